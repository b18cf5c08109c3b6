#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "viewdiv/enrichment.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/pair_matrix.hpp"
#include "viewdiv/taxonomy.hpp"
#include "viewdiv/topic_model.hpp"

namespace viewdiv {

inline constexpr double kDefaultKlEps = 1e-9;

// ---------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------

// One weight per framing aspect, in the fixed order problem definition,
// causal attribution, moral evaluation, treatment recommendation.
struct AspectWeights {
    double pd = 0.25;
    double ca = 0.25;
    double me = 0.25;
    double tr = 0.25;

    static AspectWeights from_array(const std::array<double, 4>& w) {
        AspectWeights a{w[0], w[1], w[2], w[3]};
        a.validate();
        return a;
    }

    std::array<double, 4> as_array() const { return {pd, ca, me, tr}; }

    void validate() const {
        double sum = pd + ca + me + tr;
        if (pd < 0 || ca < 0 || me < 0 || tr < 0 || std::fabs(sum - 1.0) > 1e-9)
            throw ConfigError("aspect weights must be non-negative and sum to 1");
    }

    bool operator==(const AspectWeights&) const = default;
};

enum class LevelScheme { equal, ascending };

inline const char* to_string(LevelScheme s) {
    return s == LevelScheme::equal ? "equal" : "ascending";
}

inline LevelScheme level_scheme_from_string(const std::string& s) {
    if (s == "equal" || s == "eq") return LevelScheme::equal;
    if (s == "ascending" || s == "asc") return LevelScheme::ascending;
    throw ConfigError("unknown taxonomy level scheme '" + s + "'");
}

// Per-taxonomy-level weights. "equal" gives each level 0.2; "ascending"
// gives level l weight l/15, so deeper (more specific) overlap counts
// more.
struct LevelWeights {
    LevelScheme scheme = LevelScheme::equal;

    std::array<double, kTaxonomyDepth> weights() const {
        std::array<double, kTaxonomyDepth> w{};
        if (scheme == LevelScheme::equal) {
            w.fill(1.0 / kTaxonomyDepth);
        } else {
            for (std::size_t l = 0; l < kTaxonomyDepth; ++l)
                w[l] = static_cast<double>(l + 1) / 15.0;
        }
        return w;
    }

    bool operator==(const LevelWeights&) const = default;
};

// ---------------------------------------------------------------------
// Element distances
// ---------------------------------------------------------------------

// KL(p || q) with epsilon smoothing: both vectors get +eps per component
// and are renormalized before the sum. Asymmetric by design; the MMR
// consumes Div(i || j) as given.
inline double kl_divergence(const TopicDistribution& p, const TopicDistribution& q,
                            double eps = kDefaultKlEps) {
    if (p.k() != q.k())
        throw ValidationError("kl_divergence: dimension mismatch (" + std::to_string(p.k()) +
                              " vs " + std::to_string(q.k()) + ")");
    if (eps <= 0) throw ConfigError("kl_divergence: eps must be positive");
    const std::size_t k = p.k();
    double ps = p.sum() + eps * static_cast<double>(k);
    double qs = q.sum() + eps * static_cast<double>(k);
    double kl = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double pi = (p.probs[i] + eps) / ps;
        double qi = (q.probs[i] + eps) / qs;
        kl += pi * std::log(pi / qi);
    }
    return std::max(kl, 0.0); // clamp away -0 and rounding dust at p == q
}

namespace detail {

// Lexicographic comparison of the first `level` labels.
inline int compare_prefix(const CategoryPath& a, const CategoryPath& b, std::size_t level) {
    for (std::size_t i = 0; i < level; ++i) {
        int c = a.levels[i].compare(b.levels[i]);
        if (c != 0) return c;
    }
    return 0;
}

// Per-level Jaccard index over length-`level` truncated paths. Inputs
// must be sorted and deduplicated; paths shorter than `level` contribute
// nothing. Both sides empty at this level -> 1, exactly one empty -> 0.
inline double level_jaccard(std::span<const CategoryPath> a, std::span<const CategoryPath> b,
                            std::size_t level) {
    std::vector<const CategoryPath*> fa, fb;
    for (const auto& p : a)
        if (p.depth() >= level) fa.push_back(&p);
    for (const auto& p : b)
        if (p.depth() >= level) fb.push_back(&p);
    if (fa.empty() && fb.empty()) return 1.0;
    if (fa.empty() || fb.empty()) return 0.0;

    // Sorted full paths keep their order under prefix truncation, so a
    // two-pointer sweep with on-the-fly dedup counts the prefix sets.
    std::size_t i = 0, j = 0, na = 0, nb = 0, both = 0;
    while (i < fa.size() || j < fb.size()) {
        int cmp;
        if (i >= fa.size())
            cmp = 1;
        else if (j >= fb.size())
            cmp = -1;
        else
            cmp = compare_prefix(*fa[i], *fb[j], level);

        if (cmp == 0) {
            ++na, ++nb, ++both;
            const CategoryPath* cur = fa[i];
            while (i < fa.size() && compare_prefix(*fa[i], *cur, level) == 0) ++i;
            while (j < fb.size() && compare_prefix(*fb[j], *cur, level) == 0) ++j;
        } else if (cmp < 0) {
            ++na;
            const CategoryPath* cur = fa[i];
            while (i < fa.size() && compare_prefix(*fa[i], *cur, level) == 0) ++i;
        } else {
            ++nb;
            const CategoryPath* cur = fb[j];
            while (j < fb.size() && compare_prefix(*fb[j], *cur, level) == 0) ++j;
        }
    }
    std::size_t uni = na + nb - both;
    return static_cast<double>(both) / static_cast<double>(uni);
}

} // namespace detail

// Weighted Jaccard distance over two category-path sets: distance =
// 1 - sum over levels of w_l * J_l, with J_l the Jaccard index of the
// level-l truncations. Inputs need not be sorted.
inline double weighted_jaccard_distance(std::span<const CategoryPath> a,
                                        std::span<const CategoryPath> b,
                                        const LevelWeights& lw) {
    std::vector<CategoryPath> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    detail::sort_unique(sa);
    detail::sort_unique(sb);
    const auto w = lw.weights();
    double sim = 0;
    for (std::size_t l = 1; l <= kTaxonomyDepth; ++l)
        sim += w[l - 1] * detail::level_jaccard(sa, sb, l);
    return std::clamp(1.0 - sim, 0.0, 1.0);
}

inline double weighted_jaccard_distance(const std::vector<CategoryPath>& a,
                                        const std::vector<CategoryPath>& b,
                                        const LevelWeights& lw) {
    return weighted_jaccard_distance(std::span<const CategoryPath>(a),
                                     std::span<const CategoryPath>(b), lw);
}

// Similarity counterpart used by the moral-evaluation term.
inline double jaccard_similarity(const CategoryPath& a, const CategoryPath& b,
                                 const LevelWeights& lw) {
    std::array<CategoryPath, 1> sa{a}, sb{b};
    return 1.0 - weighted_jaccard_distance(std::span<const CategoryPath>(sa),
                                           std::span<const CategoryPath>(sb), lw);
}

enum class MoralAggregate { mean, max };

inline const char* to_string(MoralAggregate m) {
    return m == MoralAggregate::mean ? "mean" : "max";
}

inline MoralAggregate moral_aggregate_from_string(const std::string& s) {
    if (s == "mean") return MoralAggregate::mean;
    if (s == "max") return MoralAggregate::max;
    throw ConfigError("unknown moral aggregate '" + s + "'");
}

// Moral-evaluation divergence: for every body-paragraph pair, category
// similarity times absolute sentiment difference, aggregated over all
// pairs. Paragraphs on disjoint categories contribute nothing; the same
// category evaluated with opposite sentiment contributes the most.
inline double moral_divergence(const EnrichedArticle& a, const EnrichedArticle& b,
                               const LevelWeights& lw,
                               MoralAggregate aggregate = MoralAggregate::mean) {
    if (a.body_annotations.empty() || b.body_annotations.empty())
        throw ValidationError("moral_divergence: article '" +
                              (a.body_annotations.empty() ? a.id : b.id) +
                              "' has no body annotations");
    double acc = 0;
    for (const auto& pa : a.body_annotations) {
        for (const auto& pb : b.body_annotations) {
            double term = jaccard_similarity(pa.category, pb.category, lw) *
                          std::fabs(pa.sentiment - pb.sentiment);
            if (aggregate == MoralAggregate::max)
                acc = std::max(acc, term);
            else
                acc += term;
        }
    }
    if (aggregate == MoralAggregate::mean)
        acc /= static_cast<double>(a.body_annotations.size() * b.body_annotations.size());
    return acc;
}

// Treatment-recommendation distance over suggestion-category sets.
// No suggestions on either side is no evidence of differing treatments
// (0); suggestions on exactly one side is maximal disagreement (1).
inline double treatment_distance(const EnrichedArticle& a, const EnrichedArticle& b,
                                 const LevelWeights& lw) {
    const bool ea = a.suggestion_categories.empty();
    const bool eb = b.suggestion_categories.empty();
    if (ea && eb) return 0.0;
    if (ea != eb) return 1.0;
    return weighted_jaccard_distance(a.suggestion_categories, b.suggestion_categories, lw);
}

// ---------------------------------------------------------------------
// Matrix construction
// ---------------------------------------------------------------------

struct AspectMatrices {
    PairMatrix pd; // problem definition, KL divergence (asymmetric)
    PairMatrix ca; // causal attribution, weighted Jaccard over body categories
    PairMatrix me; // moral evaluation
    PairMatrix tr; // treatment recommendation
};

inline AspectMatrices aspect_matrices(const std::vector<EnrichedArticle>& articles,
                                      const LevelWeights& lw, double eps = kDefaultKlEps,
                                      MoralAggregate aggregate = MoralAggregate::mean) {
    if (articles.size() < 2)
        throw ValidationError("aspect_matrices: need at least 2 articles");
    std::vector<std::string> ids;
    ids.reserve(articles.size());
    for (const auto& e : articles) ids.push_back(e.id);

    AspectMatrices m{PairMatrix(ids, "problem_definition"),
                     PairMatrix(ids, "causal_attribution"),
                     PairMatrix(ids, "moral_evaluation"),
                     PairMatrix(ids, "treatment_recommendation")};

    std::vector<std::vector<CategoryPath>> body_cats(articles.size());
    for (std::size_t i = 0; i < articles.size(); ++i) {
        for (const auto& ann : articles[i].body_annotations)
            body_cats[i].push_back(ann.category);
        detail::sort_unique(body_cats[i]);
    }

    const std::size_t n = articles.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue; // structural zeros
            m.pd.at(i, j) = kl_divergence(articles[i].topic_dist, articles[j].topic_dist, eps);
            if (j > i) {
                double ca = weighted_jaccard_distance(body_cats[i], body_cats[j], lw);
                double me = moral_divergence(articles[i], articles[j], lw, aggregate);
                double tr = treatment_distance(articles[i], articles[j], lw);
                m.ca.at(i, j) = m.ca.at(j, i) = ca;
                m.me.at(i, j) = m.me.at(j, i) = me;
                m.tr.at(i, j) = m.tr.at(j, i) = tr;
            }
        }
    }
    return m;
}

// Min-max rescaling of the off-diagonal entries; diagonal entries are
// structural zeros, not observations, and stay put. A constant
// off-diagonal matrix normalizes to all zeros.
inline PairMatrix normalize_minmax(const PairMatrix& m) {
    const std::size_t n = m.size();
    if (n < 2) throw ValidationError("normalize_minmax: need at least 2 ids");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            lo = std::min(lo, m.at(i, j));
            hi = std::max(hi, m.at(i, j));
        }
    PairMatrix out(m.ids(), m.kind());
    const double range = hi - lo;
    if (range <= 0) return out; // degenerate: all off-diagonal values equal
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            out.at(i, j) = std::clamp((m.at(i, j) - lo) / range, 0.0, 1.0);
        }
    return out;
}

// Weighted elementwise sum of the four normalized aspect matrices into
// the combined viewpoint-diversity matrix.
inline PairMatrix combine(const PairMatrix& pd, const PairMatrix& ca, const PairMatrix& me,
                          const PairMatrix& tr, const AspectWeights& w) {
    w.validate();
    if (!pd.same_ids(ca) || !pd.same_ids(me) || !pd.same_ids(tr))
        throw ValidationError("combine: aspect matrices have mismatched id order");
    PairMatrix out(pd.ids(), "diversity");
    const std::size_t n = pd.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = w.pd * pd.at(i, j) + w.ca * ca.at(i, j) + w.me * me.at(i, j) +
                       w.tr * tr.at(i, j);
            out.at(i, j) = std::clamp(v, 0.0, 1.0);
        }
    return out;
}

} // namespace viewdiv
