#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewdiv/corpus.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/distances.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/mmr.hpp"
#include "viewdiv/topic_model.hpp"

namespace viewdiv {

// What the viewpoint-diversity metric needs to know about one article:
// its channel set (with the level-1 category fallback already applied by
// the caller) and its topic distribution.
struct ViewpointSignals {
    std::set<std::string> channels;
    TopicDistribution topics;
};

// Cosine distance between multi-hot channel vectors. Only the overlap
// matters: sim = |A ∩ B| / sqrt(|A| |B|). Two empty sets are treated as
// indistinguishable (distance 0); one empty set is maximally far (1).
inline double channel_cosine_distance(const std::set<std::string>& a,
                                      const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& c : a) inter += b.count(c);
    double sim = static_cast<double>(inter) /
                 std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return std::clamp(1.0 - sim, 0.0, 1.0);
}

// Intra-list viewpoint diversity: the mean over ordered pairs i != j of
// 0.5 * channel cosine distance + 0.5 * KL(topics_i || topics_j).
// A single-item list has no pairs and scores 0 by convention.
inline double ild_viewpoint(std::span<const std::string> items,
                            const std::unordered_map<std::string, ViewpointSignals>& signals,
                            double eps = kDefaultKlEps) {
    const std::size_t n = items.size();
    if (n < 2) return 0.0;
    auto lookup = [&](const std::string& id) -> const ViewpointSignals& {
        auto it = signals.find(id);
        if (it == signals.end())
            throw LookupError("ild_viewpoint: no topic distribution for article '" + id + "'");
        return it->second;
    };
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& si = lookup(items[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto& sj = lookup(items[j]);
            sum += 0.5 * channel_cosine_distance(si.channels, sj.channels) +
                   0.5 * kl_divergence(si.topics, sj.topics, eps);
        }
    }
    return sum / static_cast<double>(n * (n - 1));
}

namespace detail {

// Counts inversions by merge sort; O(n log n).
inline std::size_t count_inversions(std::vector<std::size_t>& seq, std::vector<std::size_t>& tmp,
                                    std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::size_t inv = count_inversions(seq, tmp, lo, mid) + count_inversions(seq, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (seq[i] <= seq[j])
            tmp[k++] = seq[i++];
        else {
            inv += mid - i;
            tmp[k++] = seq[j++];
        }
    }
    while (i < mid) tmp[k++] = seq[i++];
    while (j < hi) tmp[k++] = seq[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
              tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              seq.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

} // namespace detail

// Kendall's tau between two strict rankings of the same id set:
// (concordant - discordant) / (n (n-1) / 2). Computed via inversion
// counting, so large pools stay cheap.
inline double kendall_tau(std::span<const std::string> rank_a,
                          std::span<const std::string> rank_b) {
    if (rank_a.size() != rank_b.size())
        throw ValidationError("kendall_tau: rankings have different lengths");
    const std::size_t n = rank_a.size();
    if (n < 2) return 1.0;

    std::unordered_map<std::string, std::size_t> pos_b;
    pos_b.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!pos_b.emplace(rank_b[i], i).second)
            throw ValidationError("kendall_tau: duplicate id '" + std::string(rank_b[i]) +
                                  "' in ranking");
    std::vector<std::size_t> seq(n);
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = pos_b.find(rank_a[i]);
        if (it == pos_b.end())
            throw ValidationError("kendall_tau: id '" + std::string(rank_a[i]) +
                                  "' missing from second ranking");
        if (seen[it->second])
            throw ValidationError("kendall_tau: duplicate id '" + std::string(rank_a[i]) +
                                  "' in ranking");
        seen[it->second] = 1;
        seq[i] = it->second;
    }

    std::vector<std::size_t> tmp(n);
    const double inv = static_cast<double>(detail::count_inversions(seq, tmp, 0, n));
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return 1.0 - 2.0 * inv / pairs;
}

inline double avg_words(const RankedList& list, const Corpus& corpus) {
    if (list.items.empty()) throw ValidationError("avg_words: empty list");
    double sum = 0;
    for (const auto& id : list.items)
        sum += static_cast<double>(corpus.by_id(id).word_count());
    return sum / static_cast<double>(list.items.size());
}

struct PublisherStats {
    // recommendation share divided by corpus share; publishers never
    // recommended map to 0
    std::map<std::string, double> ratios;
    double mean_distinct = 0; // mean distinct-publisher count per list
};

inline PublisherStats publisher_ratio(std::span<const RankedList> lists, const Corpus& corpus) {
    if (lists.empty()) throw ValidationError("publisher_ratio: no lists");
    std::map<std::string, std::size_t> corpus_counts;
    for (const auto& a : corpus) ++corpus_counts[a.publisher];

    std::map<std::string, std::size_t> slot_counts;
    std::size_t total_slots = 0;
    double distinct_sum = 0;
    for (const auto& list : lists) {
        std::set<std::string> seen;
        for (const auto& id : list.items) {
            const auto& p = corpus.by_id(id).publisher;
            ++slot_counts[p];
            ++total_slots;
            seen.insert(p);
        }
        distinct_sum += static_cast<double>(seen.size());
    }

    PublisherStats stats;
    stats.mean_distinct = distinct_sum / static_cast<double>(lists.size());
    const double corpus_size = static_cast<double>(corpus.size());
    for (const auto& [publisher, count] : corpus_counts) {
        double ratio = 0;
        if (total_slots > 0) {
            auto it = slot_counts.find(publisher);
            if (it != slot_counts.end()) {
                double rec_share = static_cast<double>(it->second) /
                                   static_cast<double>(total_slots);
                double corpus_share = static_cast<double>(count) / corpus_size;
                ratio = rec_share / corpus_share;
            }
        }
        stats.ratios[publisher] = ratio;
    }
    return stats;
}

// One row of the offline evaluation: all metrics for one lambda.
struct MetricRecord {
    double lambda = 0;
    double ild_diversity = 0;
    double mean_relevance = 0;
    double kendall_tau = 0;
    double avg_words = 0;
    std::map<std::string, double> publisher_ratios;
    double distinct_publishers = 0;
};

inline void metric_records_to_csv(std::span<const MetricRecord> records, std::ostream& out) {
    std::set<std::string> publishers;
    for (const auto& r : records)
        for (const auto& [p, ratio] : r.publisher_ratios) publishers.insert(p);
    out << "lambda,ild_diversity,mean_relevance,kendall_tau,avg_words,distinct_publishers";
    for (const auto& p : publishers) out << ',' << p;
    out << '\n';
    for (const auto& r : records) {
        out << detail::format_g12(r.lambda) << ',' << detail::format_g12(r.ild_diversity) << ','
            << detail::format_g12(r.mean_relevance) << ',' << detail::format_g12(r.kendall_tau)
            << ',' << detail::format_g12(r.avg_words) << ','
            << detail::format_g12(r.distinct_publishers);
        for (const auto& p : publishers) {
            auto it = r.publisher_ratios.find(p);
            out << ',' << detail::format_g12(it == r.publisher_ratios.end() ? 0.0 : it->second);
        }
        out << '\n';
    }
}

} // namespace viewdiv
