#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "viewdiv/article.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/errors.hpp"

namespace viewdiv {

// An ordered, id-indexed set of articles. Immutable after parsing;
// safe for concurrent reads.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<Article> articles) {
        for (auto& a : articles) add(std::move(a));
    }

    void add(Article a) {
        if (index_.count(a.id))
            throw ValidationError("duplicate article id '" + a.id + "'");
        index_.emplace(a.id, articles_.size());
        articles_.push_back(std::move(a));
    }

    std::size_t size() const { return articles_.size(); }
    bool empty() const { return articles_.empty(); }

    const Article& at(std::size_t i) const { return articles_.at(i); }

    const Article* find(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &articles_[it->second];
    }

    const Article& by_id(const std::string& id) const {
        const Article* a = find(id);
        if (!a) throw LookupError("unknown article id '" + id + "'");
        return *a;
    }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(articles_.size());
        for (const auto& a : articles_) out.push_back(a.id);
        return out;
    }

    auto begin() const { return articles_.begin(); }
    auto end() const { return articles_.end(); }

private:
    std::vector<Article> articles_;
    std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline const char* kKnownArticleKeys[] = {"id",          "title",    "editorial_title",
                                          "publisher",   "published_at", "channels",
                                          "paragraphs"};

inline bool is_known_article_key(const std::string& k) {
    for (const char* key : kKnownArticleKeys)
        if (k == key) return true;
    return false;
}

inline bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

} // namespace detail

// Parses one corpus record (one JSON object). Context is prepended to
// error messages so line numbers survive.
inline Article parse_article_json(const nlohmann::json& j, const std::string& context = "") {
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError(context.empty() ? msg : context + ": " + msg);
    };
    if (!j.is_object()) fail("record is not a JSON object");

    Article a;
    try {
        a.id = j.at("id").get<std::string>();
        a.title = j.at("title").get<std::string>();
        if (j.contains("editorial_title") && !j.at("editorial_title").is_null())
            a.editorial_title = j.at("editorial_title").get<std::string>();
        a.publisher = j.at("publisher").get<std::string>();
        a.published_at = j.at("published_at").get<std::string>();
        for (const auto& c : j.at("channels")) a.channels.insert(c.get<std::string>());
        for (const auto& p : j.at("paragraphs")) a.paragraphs.push_back(p.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    }

    if (a.id.empty()) fail("empty id");
    if (!detail::looks_like_iso_date(a.published_at))
        fail("published_at '" + a.published_at + "' is not an ISO-8601 date");
    if (a.paragraphs.empty()) fail("paragraphs: article must have at least one paragraph");
    for (const auto& p : a.paragraphs)
        if (is_blank(p)) fail("paragraphs: empty or whitespace-only paragraph");

    nlohmann::json extra = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!detail::is_known_article_key(it.key())) extra[it.key()] = it.value();
    if (!extra.empty()) a.extra_json = extra.dump();

    return a;
}

inline nlohmann::json article_to_json(const Article& a) {
    nlohmann::json j = a.extra_json.empty() ? nlohmann::json::object()
                                            : nlohmann::json::parse(a.extra_json);
    j["id"] = a.id;
    j["title"] = a.title;
    j["editorial_title"] = a.editorial_title ? nlohmann::json(*a.editorial_title)
                                             : nlohmann::json(nullptr);
    j["publisher"] = a.publisher;
    j["published_at"] = a.published_at;
    j["channels"] = a.channels;
    j["paragraphs"] = a.paragraphs;
    return j;
}

// Reads a UTF-8, one-JSON-object-per-line stream. Blank lines are
// skipped. Input order is preserved; a duplicate id anywhere is an
// error naming the id.
inline Corpus parse_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        corpus.add(parse_article_json(j, "line " + std::to_string(lineno)));
    }
    return corpus;
}

inline void serialize_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& a : corpus) out << article_to_json(a).dump() << '\n';
}

// FNV-1a over the serialized corpus; recorded in experiment reports.
inline std::string corpus_hash(const Corpus& corpus) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& a : corpus) h = detail::fnv1a(article_to_json(a).dump() + "\n", h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace viewdiv
