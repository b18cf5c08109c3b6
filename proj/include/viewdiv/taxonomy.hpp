#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewdiv/errors.hpp"
#include "viewdiv/text.hpp"

namespace viewdiv {

inline constexpr std::size_t kTaxonomyDepth = 5;

// A path in the five-level category taxonomy, most general label first.
// Lexicographic ordering on the labels gives the deterministic tie-break
// order used everywhere paths are compared.
struct CategoryPath {
    std::vector<std::string> levels;

    CategoryPath() = default;
    CategoryPath(std::initializer_list<std::string> l) : levels(l) {}
    explicit CategoryPath(std::vector<std::string> l) : levels(std::move(l)) {}

    std::size_t depth() const { return levels.size(); }
    bool valid() const {
        if (levels.empty() || levels.size() > kTaxonomyDepth) return false;
        return std::none_of(levels.begin(), levels.end(),
                            [](const std::string& s) { return s.empty(); });
    }

    auto operator<=>(const CategoryPath&) const = default;
};

// Keyword table standing in for an external text-classification service.
// Maps a normalized keyword to the path it is evidence for; a paragraph
// is assigned the path with the most keyword occurrences.
class Taxonomy {
public:
    Taxonomy() = default;

    Taxonomy(std::string fallback_root, std::map<std::string, CategoryPath> keywords)
        : fallback_({std::move(fallback_root)}), keywords_(std::move(keywords)) {
        validate();
    }

    static Taxonomy from_json(const nlohmann::json& j) {
        Taxonomy t;
        try {
            t.fallback_ = CategoryPath{{j.at("fallback").get<std::string>()}};
            for (auto it = j.at("keywords").begin(); it != j.at("keywords").end(); ++it)
                t.keywords_[it.key()] = CategoryPath(it.value().get<std::vector<std::string>>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("taxonomy: ") + e.what());
        }
        t.validate();
        return t;
    }

    nlohmann::json to_json() const {
        nlohmann::json kw = nlohmann::json::object();
        for (const auto& [k, path] : keywords_) kw[k] = path.levels;
        return {{"fallback", fallback_.levels.front()}, {"keywords", kw}};
    }

    const CategoryPath& fallback() const { return fallback_; }
    std::size_t keyword_count() const { return keywords_.size(); }

    // All distinct level-1 labels, fallback included; this is the label
    // vocabulary the evaluation metric falls back to when an article has
    // no channels.
    std::vector<std::string> level1_labels() const {
        std::vector<std::string> out{fallback_.levels.front()};
        for (const auto& [k, path] : keywords_) out.push_back(path.levels.front());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Occurrence-counted keyword overlap; ties go to the
    // lexicographically smaller path, no hit at all to the fallback root.
    CategoryPath classify(std::string_view paragraph, const Normalizer& norm) const {
        if (keywords_.empty()) throw ConfigError("classify: empty taxonomy table");
        std::map<CategoryPath, std::size_t> hits;
        for (const auto& tok : preprocess(paragraph, norm)) {
            auto it = keywords_.find(tok);
            if (it != keywords_.end()) ++hits[it->second];
        }
        const CategoryPath* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [path, count] : hits) {
            if (count > best_count) { // map order makes the first max the smallest path
                best = &path;
                best_count = count;
            }
        }
        return best ? *best : fallback_;
    }

private:
    void validate() const {
        if (!fallback_.valid() || fallback_.depth() != 1)
            throw ConfigError("taxonomy: fallback must be a single root label");
        for (const auto& [k, path] : keywords_) {
            if (k.empty()) throw ConfigError("taxonomy: empty keyword");
            if (!path.valid())
                throw ConfigError("taxonomy: keyword '" + k + "' maps to an invalid path");
        }
    }

    CategoryPath fallback_;
    std::map<std::string, CategoryPath> keywords_;
};

} // namespace viewdiv
