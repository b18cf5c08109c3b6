#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewdiv/errors.hpp"
#include "viewdiv/pair_matrix.hpp"

namespace viewdiv {

// TF-IDF document vectors with natural-log idf and length-normalized
// term frequency: tf = count / doc_length, idf = ln(N / df), weight =
// tf * idf. Terms present in every document get idf 0 and are dropped,
// so vectors never store zero weights.
class TfIdfIndex {
public:
    using SparseVector = std::unordered_map<std::size_t, double>;

    static TfIdfIndex build(const std::vector<std::string>& ids,
                            const std::vector<std::vector<std::string>>& docs) {
        if (ids.size() != docs.size())
            throw ValidationError("tfidf: ids and documents differ in length");
        if (docs.empty()) throw ValidationError("tfidf: empty corpus");
        bool any_tokens = false;
        for (const auto& d : docs) any_tokens |= !d.empty();
        if (!any_tokens) throw ValidationError("tfidf: corpus has no tokens");

        TfIdfIndex index;
        index.ids_ = ids;
        for (std::size_t d = 0; d < ids.size(); ++d)
            index.doc_index_.emplace(ids[d], d);
        if (index.doc_index_.size() != ids.size())
            throw ValidationError("tfidf: duplicate document id");

        // document frequencies over a first-occurrence-ordered vocabulary
        std::vector<std::size_t> df;
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> counts(docs.size());
        for (std::size_t d = 0; d < docs.size(); ++d) {
            std::unordered_map<std::size_t, std::size_t> local;
            for (const auto& tok : docs[d]) {
                auto [it, fresh] = index.vocab_.try_emplace(tok, index.tokens_.size());
                if (fresh) {
                    index.tokens_.push_back(tok);
                    df.push_back(0);
                }
                ++local[it->second];
            }
            counts[d].assign(local.begin(), local.end());
            std::sort(counts[d].begin(), counts[d].end());
            for (const auto& [term, c] : counts[d]) ++df[term];
        }

        const double n = static_cast<double>(docs.size());
        index.idf_.resize(index.tokens_.size());
        for (std::size_t t = 0; t < index.idf_.size(); ++t)
            index.idf_[t] = std::log(n / static_cast<double>(df[t]));

        index.vectors_.resize(docs.size());
        index.norms_.resize(docs.size(), 0.0);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            const double len = static_cast<double>(docs[d].size());
            double sq = 0;
            for (const auto& [term, c] : counts[d]) {
                double w = (static_cast<double>(c) / len) * index.idf_[term];
                if (w > 0) {
                    index.vectors_[d].emplace(term, w);
                    sq += w * w;
                }
            }
            index.norms_[d] = std::sqrt(sq);
        }
        return index;
    }

    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t vocab_size() const { return tokens_.size(); }

    double idf(const std::string& token) const {
        auto it = vocab_.find(token);
        return it == vocab_.end() ? 0.0 : idf_[it->second];
    }

    const SparseVector& vector_for(const std::string& id) const {
        auto it = doc_index_.find(id);
        if (it == doc_index_.end())
            throw LookupError("tfidf index has no document '" + id + "'");
        return vectors_[it->second];
    }

    static double cosine(const SparseVector& a, double norm_a, const SparseVector& b,
                         double norm_b) {
        if (norm_a == 0 || norm_b == 0) return 0.0;
        const SparseVector& small = a.size() <= b.size() ? a : b;
        const SparseVector& large = a.size() <= b.size() ? b : a;
        double dot = 0;
        for (const auto& [term, w] : small) {
            auto it = large.find(term);
            if (it != large.end()) dot += w * it->second;
        }
        return dot / (norm_a * norm_b);
    }

    double cosine_between(std::size_t i, std::size_t j) const {
        return cosine(vectors_[i], norms_[i], vectors_[j], norms_[j]);
    }

    // Pairwise cosine-similarity matrix. Diagonal is 1 except for
    // documents with an empty vector, which score 0 against everything
    // including themselves.
    PairMatrix relevance_matrix() const {
        PairMatrix m(ids_, "relevance");
        const std::size_t n = ids_.size();
        for (std::size_t i = 0; i < n; ++i) {
            m.at(i, i) = norms_[i] > 0 ? 1.0 : 0.0;
            for (std::size_t j = i + 1; j < n; ++j)
                m.at(i, j) = m.at(j, i) = cosine_between(i, j);
        }
        return m;
    }

    struct QueryScores {
        std::vector<double> scores; // aligned with ids()
        bool all_oov = false;       // query had no weighted term
    };

    // Cosine between the query's tf-idf vector and every document;
    // optional pre-filter for candidate pools.
    QueryScores query_relevance(const std::vector<std::string>& query_tokens) const {
        if (query_tokens.empty()) throw ValidationError("tfidf: empty query");
        SparseVector qv;
        std::unordered_map<std::size_t, std::size_t> counts;
        for (const auto& tok : query_tokens) {
            auto it = vocab_.find(tok);
            if (it != vocab_.end()) ++counts[it->second];
        }
        double sq = 0;
        const double len = static_cast<double>(query_tokens.size());
        for (const auto& [term, c] : counts) {
            double w = (static_cast<double>(c) / len) * idf_[term];
            if (w > 0) {
                qv.emplace(term, w);
                sq += w * w;
            }
        }
        QueryScores out;
        out.scores.resize(ids_.size(), 0.0);
        if (qv.empty()) {
            out.all_oov = true;
            return out;
        }
        const double qnorm = std::sqrt(sq);
        for (std::size_t d = 0; d < ids_.size(); ++d)
            out.scores[d] = cosine(qv, qnorm, vectors_[d], norms_[d]);
        return out;
    }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> doc_index_;
    std::vector<std::string> tokens_; // index -> token
    std::unordered_map<std::string, std::size_t> vocab_;
    std::vector<double> idf_;
    std::vector<SparseVector> vectors_;
    std::vector<double> norms_;
};

} // namespace viewdiv
