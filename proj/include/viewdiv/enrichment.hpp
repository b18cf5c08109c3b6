#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "viewdiv/article.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/sentiment.hpp"
#include "viewdiv/suggestions.hpp"
#include "viewdiv/taxonomy.hpp"
#include "viewdiv/text.hpp"
#include "viewdiv/topic_model.hpp"

namespace viewdiv {

struct ParagraphAnnotation {
    CategoryPath category;
    double sentiment = 0.0; // in [-1, 1]
};

// The four framing-aspect metadata bundles for one article:
// topic distribution (problem definition), per-body-paragraph category +
// sentiment (causal attribution, moral evaluation), suggestion categories
// (treatment recommendation). suggestion_sentences records where the
// treatment categories came from.
struct EnrichedArticle {
    std::string id;
    int x = 1;
    int y = 1;
    TopicDistribution topic_dist;
    std::vector<ParagraphAnnotation> body_annotations;
    std::vector<CategoryPath> suggestion_categories; // sorted, unique
    std::vector<std::string> suggestion_sentences;

    // Level-1 labels of the body annotations; the evaluation metric
    // falls back to these when an article carries no channels.
    std::vector<std::string> level1_categories() const {
        std::vector<std::string> out;
        for (const auto& ann : body_annotations)
            if (!ann.category.levels.empty()) out.push_back(ann.category.levels.front());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// Everything the self-contained pipeline needs to annotate an article.
struct BuiltinAnnotators {
    TopicModel model;
    Taxonomy taxonomy;
    SentimentLexicon sentiment;
    CueLexicon cues;
    Normalizer normalizer;
    std::size_t inference_sweeps = 50;
};

namespace detail {

inline void sort_unique(std::vector<CategoryPath>& paths) {
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
}

} // namespace detail

inline EnrichedArticle enrich(const StructuredArticle& sa, const BuiltinAnnotators& ann,
                              std::uint64_t seed) {
    EnrichedArticle out;
    out.id = sa.article->id;
    out.x = sa.x;
    out.y = sa.y;

    auto intro_tokens = preprocess(sa.intro_text(), ann.normalizer);
    out.topic_dist = infer_topics(ann.model, intro_tokens, ann.inference_sweeps,
                                  detail::mix_seed(seed, sa.article->id));

    for (const auto& paragraph : sa.body_paragraphs()) {
        ParagraphAnnotation pa;
        pa.category = ann.taxonomy.classify(paragraph, ann.normalizer);
        pa.sentiment = ann.sentiment.score(paragraph, ann.normalizer);
        out.body_annotations.push_back(std::move(pa));
    }

    out.suggestion_sentences = mine_suggestions(sa.conclusion_paragraphs(), ann.cues);
    for (const auto& sentence : out.suggestion_sentences)
        out.suggestion_categories.push_back(ann.taxonomy.classify(sentence, ann.normalizer));
    detail::sort_unique(out.suggestion_categories);
    return out;
}

// ---------------------------------------------------------------------
// Sidecar annotations: precomputed per-article enrichment records with
// the same shape the built-in pipeline produces. One JSON object per
// line, keyed by article id.
// ---------------------------------------------------------------------

inline nlohmann::json enriched_to_json(const EnrichedArticle& e) {
    nlohmann::json body = nlohmann::json::array();
    for (const auto& ann : e.body_annotations)
        body.push_back({{"category", ann.category.levels}, {"sentiment", ann.sentiment}});
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& path : e.suggestion_categories) cats.push_back(path.levels);
    return {{"id", e.id},
            {"topic_dist", e.topic_dist.probs},
            {"body_annotations", body},
            {"suggestion_sentences", e.suggestion_sentences},
            {"suggestion_categories", cats}};
}

class SidecarAnnotations {
public:
    struct Record {
        TopicDistribution topic_dist;
        std::vector<ParagraphAnnotation> body_annotations;
        std::vector<CategoryPath> suggestion_categories;
        std::vector<std::string> suggestion_sentences;
    };

    static SidecarAnnotations parse(std::istream& in) {
        SidecarAnnotations side;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_blank(line)) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError("sidecar line " + std::to_string(lineno) + ": " + e.what());
            }
            side.add(j, lineno);
        }
        return side;
    }

    bool contains(const std::string& id) const { return records_.count(id) != 0; }
    std::size_t size() const { return records_.size(); }

    const Record& at(const std::string& id) const {
        auto it = records_.find(id);
        if (it == records_.end())
            throw LookupError("sidecar has no annotations for article '" + id + "'");
        return it->second;
    }

private:
    void add(const nlohmann::json& j, std::size_t lineno) {
        const std::string ctx = "sidecar line " + std::to_string(lineno);
        std::string id;
        Record rec;
        try {
            id = j.at("id").get<std::string>();
            rec.topic_dist.probs = j.at("topic_dist").get<std::vector<double>>();
            for (const auto& ann : j.at("body_annotations")) {
                ParagraphAnnotation pa;
                pa.category = CategoryPath(ann.at("category").get<std::vector<std::string>>());
                pa.sentiment = ann.at("sentiment").get<double>();
                rec.body_annotations.push_back(std::move(pa));
            }
            rec.suggestion_sentences =
                j.at("suggestion_sentences").get<std::vector<std::string>>();
            for (const auto& path : j.at("suggestion_categories"))
                rec.suggestion_categories.push_back(
                    CategoryPath(path.get<std::vector<std::string>>()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(ctx + ": " + e.what());
        }

        if (records_.count(id)) throw ValidationError(ctx + ": duplicate id '" + id + "'");
        validate(rec, ctx);
        detail::sort_unique(rec.suggestion_categories);
        records_.emplace(std::move(id), std::move(rec));
    }

    static void validate(Record& rec, const std::string& ctx) {
        double sum = 0;
        for (double p : rec.topic_dist.probs) {
            if (p < 0 || !std::isfinite(p))
                throw ValidationError(ctx + ": topic_dist has a negative or non-finite entry");
            sum += p;
        }
        if (rec.topic_dist.probs.empty() || std::fabs(sum - 1.0) > 1e-6)
            throw ValidationError(ctx + ": topic_dist does not sum to 1");
        for (double& p : rec.topic_dist.probs) p /= sum;
        for (const auto& ann : rec.body_annotations) {
            if (!ann.category.valid())
                throw ValidationError(ctx + ": invalid category path");
            if (ann.sentiment < -1.0 || ann.sentiment > 1.0)
                throw ValidationError(ctx + ": sentiment outside [-1, 1]");
        }
        for (const auto& path : rec.suggestion_categories)
            if (!path.valid()) throw ValidationError(ctx + ": invalid suggestion category");
    }

    std::unordered_map<std::string, Record> records_;
};

// Sidecar records were produced under the sidecar author's own (x, y),
// so the body-annotation count is taken as given rather than checked
// against this run's segmentation.
inline EnrichedArticle enrich(const StructuredArticle& sa, const SidecarAnnotations& side) {
    const auto& rec = side.at(sa.article->id);
    EnrichedArticle out;
    out.id = sa.article->id;
    out.x = sa.x;
    out.y = sa.y;
    out.topic_dist = rec.topic_dist;
    out.body_annotations = rec.body_annotations;
    out.suggestion_categories = rec.suggestion_categories;
    out.suggestion_sentences = rec.suggestion_sentences;
    return out;
}

// Either annotation route behind one handle; sidecar wins when present.
class AnnotationSource {
public:
    static AnnotationSource builtin(BuiltinAnnotators ann) {
        return AnnotationSource(std::move(ann));
    }
    static AnnotationSource sidecar(SidecarAnnotations side) {
        return AnnotationSource(std::move(side));
    }

    bool is_sidecar() const { return std::holds_alternative<SidecarAnnotations>(source_); }

    const BuiltinAnnotators& builtin_annotators() const {
        return std::get<BuiltinAnnotators>(source_);
    }

    EnrichedArticle enrich_article(const StructuredArticle& sa, std::uint64_t seed) const {
        if (const auto* side = std::get_if<SidecarAnnotations>(&source_))
            return enrich(sa, *side);
        return enrich(sa, std::get<BuiltinAnnotators>(source_), seed);
    }

private:
    explicit AnnotationSource(BuiltinAnnotators ann) : source_(std::move(ann)) {}
    explicit AnnotationSource(SidecarAnnotations side) : source_(std::move(side)) {}

    std::variant<BuiltinAnnotators, SidecarAnnotations> source_;
};

inline void write_sidecar(const std::vector<EnrichedArticle>& enriched, std::ostream& out) {
    for (const auto& e : enriched) out << enriched_to_json(e).dump() << '\n';
}

} // namespace viewdiv
