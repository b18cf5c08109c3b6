#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewdiv/corpus.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/pair_matrix.hpp"

namespace viewdiv {

// Output of one greedy re-ranking: item ids in selection order with the
// MMR score each item had when it was picked.
struct RankedList {
    std::string anchor_id;
    std::vector<std::string> items;
    std::vector<double> scores;
    double lambda = 1.0;
    std::size_t s = 0; // requested size; |items| = min(s, pool size)
};

namespace detail {

struct MmrCandidate {
    const std::string* id;
    std::size_t div_index; // index into div, unused when div is null
    double rel;            // Rel(i, anchor)
    double max_sim;        // max over selected j of 1 - Div(i||j); 0 while S is empty
};

// Greedy argmax with the documented tie order: score, then relevance to
// the anchor, then lexicographically smaller id.
inline bool mmr_better(double score, const MmrCandidate& c, double best_score,
                       const MmrCandidate& best) {
    if (score != best_score) return score > best_score;
    if (c.rel != best.rel) return c.rel > best.rel;
    return *c.id < *best.id;
}

inline RankedList mmr_impl(const std::string& anchor, std::span<const std::string> pool,
                           const PairMatrix& rel, const PairMatrix* div, double lambda,
                           std::size_t s) {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("mmr: lambda must be in [0, 1]");
    if (s < 1) throw ConfigError("mmr: list size must be >= 1");

    const std::size_t anchor_idx = rel.index_of(anchor);
    std::vector<MmrCandidate> cands;
    cands.reserve(pool.size());
    for (const auto& id : pool) {
        if (id == anchor) throw ValidationError("mmr: anchor '" + anchor + "' found in pool");
        if (!rel.contains(id))
            throw LookupError("relevance matrix has no entry for id pair ('" + id + "', '" +
                              anchor + "')");
        MmrCandidate c;
        c.id = &id;
        c.rel = rel.at(rel.index_of(id), anchor_idx);
        c.div_index = 0;
        c.max_sim = 0.0;
        if (div) {
            if (!div->contains(id))
                throw LookupError("diversity matrix has no entry for id pair ('" + id +
                                  "', '" + anchor + "')");
            c.div_index = div->index_of(id);
        }
        cands.push_back(c);
    }

    RankedList out;
    out.anchor_id = anchor;
    out.lambda = lambda;
    out.s = s;

    const std::size_t take = std::min(s, cands.size());
    const bool track_div = div != nullptr && lambda < 1.0;
    while (out.items.size() < take) {
        std::size_t best = 0;
        double best_score = 0;
        bool have_best = false;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const auto& c = cands[i];
            double score = lambda * c.rel - (1.0 - lambda) * c.max_sim;
            if (!have_best || mmr_better(score, c, best_score, cands[best])) {
                best = i;
                best_score = score;
                have_best = true;
            }
        }
        const MmrCandidate picked = cands[best];
        out.items.push_back(*picked.id);
        out.scores.push_back(best_score);
        cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(best));
        if (track_div) {
            for (auto& c : cands) {
                double sim = 1.0 - div->at(c.div_index, picked.div_index);
                c.max_sim = std::max(c.max_sim, sim);
            }
        }
    }
    return out;
}

} // namespace detail

// Maximal marginal relevance: pick, one at a time, the candidate
// maximizing lambda * Rel(i, anchor) - (1 - lambda) * max over selected
// j of (1 - Div(i||j)). The max over an empty selection is 0, so the
// first pick is decided by relevance alone (and by the tie-break when
// lambda = 0 zeroes every score).
inline RankedList mmr_rerank(const std::string& anchor, std::span<const std::string> pool,
                             const PairMatrix& rel, const PairMatrix& div, double lambda,
                             std::size_t s) {
    return detail::mmr_impl(anchor, pool, rel, &div, lambda, s);
}

// Pure relevance ranking, the lambda = 1 baseline. Exists so experiment
// configurations can name the baseline explicitly; no diversity matrix
// is consulted.
inline RankedList baseline_rerank(const std::string& anchor, std::span<const std::string> pool,
                                  const PairMatrix& rel, std::size_t s) {
    return detail::mmr_impl(anchor, pool, rel, nullptr, 1.0, s);
}

inline nlohmann::json ranked_list_to_json(const RankedList& list, const Corpus& corpus) {
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = 0; i < list.items.size(); ++i)
        items.push_back({{"id", list.items[i]},
                         {"score", list.scores[i]},
                         {"publisher", corpus.by_id(list.items[i]).publisher}});
    return {{"anchor", list.anchor_id}, {"lambda", list.lambda}, {"s", list.s}, {"items", items}};
}

} // namespace viewdiv
