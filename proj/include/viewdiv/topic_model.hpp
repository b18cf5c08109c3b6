#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewdiv/detail/util.hpp"
#include "viewdiv/errors.hpp"

namespace viewdiv {

struct TopicDistribution {
    std::vector<double> probs;
    // Set when inference had no in-vocabulary evidence and returned the
    // uniform distribution.
    bool oov_fallback = false;

    std::size_t k() const { return probs.size(); }

    double sum() const {
        double s = 0;
        for (double p : probs) s += p;
        return s;
    }
};

inline TopicDistribution uniform_distribution(std::size_t k, bool flagged = false) {
    return {std::vector<double>(k, 1.0 / static_cast<double>(k)), flagged};
}

// Plain LDA trained by collapsed Gibbs sampling. Stands in for the
// large pre-trained model the production pipeline would query; at desk
// scale a few dozen topics over a few hundred articles is plenty.
struct TopicModel {
    std::size_t K = 0;
    double alpha = 0.5;
    double beta = 0.1;
    std::vector<std::string> vocabulary;                    // index -> token
    std::unordered_map<std::string, std::size_t> vocab_index;
    std::vector<double> topic_word; // K x V row-major; each row sums to 1
    std::uint64_t seed = 0;

    std::size_t vocab_size() const { return vocabulary.size(); }

    std::span<const double> topic_row(std::size_t k) const {
        return {topic_word.data() + k * vocab_size(), vocab_size()};
    }

    const std::size_t* find_token(const std::string& tok) const {
        auto it = vocab_index.find(tok);
        return it == vocab_index.end() ? nullptr : &it->second;
    }
};

namespace detail {

// Draws from an unnormalized distribution given as a cumulative sum.
inline std::size_t sample_cumulative(const std::vector<double>& cum, Rng& rng) {
    double u = rng.next_double() * cum.back();
    for (std::size_t k = 0; k < cum.size(); ++k)
        if (u < cum[k]) return k;
    return cum.size() - 1;
}

} // namespace detail

// Collapsed Gibbs training. Single-threaded on purpose: the chain's
// visit order is part of the determinism contract, so the same seed
// always yields the bit-identical model.
inline TopicModel train_topic_model(const std::vector<std::vector<std::string>>& docs,
                                    std::size_t K, double alpha, double beta,
                                    std::size_t iterations, std::uint64_t seed) {
    if (docs.empty()) throw ValidationError("topic model: empty corpus");
    if (K < 2) throw ConfigError("topic model: K must be >= 2");
    if (iterations < 1) throw ConfigError("topic model: iterations must be >= 1");

    TopicModel model;
    model.K = K;
    model.alpha = alpha;
    model.beta = beta;
    model.seed = seed;

    // Vocabulary in first-occurrence order keeps indices reproducible.
    std::vector<std::vector<std::size_t>> word_ids(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (docs[d].empty())
            throw ValidationError("topic model: document " + std::to_string(d) + " is empty");
        word_ids[d].reserve(docs[d].size());
        for (const auto& tok : docs[d]) {
            auto [it, fresh] = model.vocab_index.try_emplace(tok, model.vocabulary.size());
            if (fresh) model.vocabulary.push_back(tok);
            word_ids[d].push_back(it->second);
        }
    }
    const std::size_t V = model.vocabulary.size();
    if (V == 0) throw ValidationError("topic model: empty vocabulary");

    const std::size_t D = docs.size();
    std::vector<std::size_t> n_dk(D * K, 0), n_kv(K * V, 0), n_k(K, 0);
    std::vector<std::vector<std::size_t>> z(D);

    detail::Rng rng(detail::mix64(seed ^ 0x6c62272e07bb0142ull));
    for (std::size_t d = 0; d < D; ++d) {
        z[d].resize(word_ids[d].size());
        for (std::size_t i = 0; i < word_ids[d].size(); ++i) {
            std::size_t k = rng.next_index(K);
            z[d][i] = k;
            ++n_dk[d * K + k];
            ++n_kv[k * V + word_ids[d][i]];
            ++n_k[k];
        }
    }

    const double v_beta = static_cast<double>(V) * beta;
    std::vector<double> cum(K);
    for (std::size_t iter = 0; iter < iterations; ++iter) {
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t i = 0; i < word_ids[d].size(); ++i) {
                const std::size_t v = word_ids[d][i];
                const std::size_t old_k = z[d][i];
                --n_dk[d * K + old_k];
                --n_kv[old_k * V + v];
                --n_k[old_k];

                double total = 0;
                for (std::size_t k = 0; k < K; ++k) {
                    double p = (static_cast<double>(n_kv[k * V + v]) + beta) /
                               (static_cast<double>(n_k[k]) + v_beta) *
                               (static_cast<double>(n_dk[d * K + k]) + alpha);
                    total += p;
                    cum[k] = total;
                }
                const std::size_t new_k = detail::sample_cumulative(cum, rng);

                z[d][i] = new_k;
                ++n_dk[d * K + new_k];
                ++n_kv[new_k * V + v];
                ++n_k[new_k];
            }
        }
    }

    model.topic_word.resize(K * V);
    for (std::size_t k = 0; k < K; ++k) {
        double row_sum = 0;
        for (std::size_t v = 0; v < V; ++v) {
            double w = (static_cast<double>(n_kv[k * V + v]) + beta) /
                       (static_cast<double>(n_k[k]) + v_beta);
            model.topic_word[k * V + v] = w;
            row_sum += w;
        }
        for (std::size_t v = 0; v < V; ++v) model.topic_word[k * V + v] /= row_sum;
    }
    return model;
}

// Fold-in Gibbs inference over a fixed model. Out-of-vocabulary tokens
// are skipped; no in-vocabulary token at all yields the uniform
// distribution with the fallback flag set.
inline TopicDistribution infer_topics(const TopicModel& model,
                                      const std::vector<std::string>& tokens,
                                      std::size_t sweeps, std::uint64_t seed) {
    const std::size_t K = model.K;
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const auto& tok : tokens)
        if (const std::size_t* v = model.find_token(tok)) ids.push_back(*v);
    if (ids.empty()) return uniform_distribution(K, true);

    detail::Rng rng(detail::mix64(seed ^ 0x27220a95fe2d4d15ull));
    const std::size_t V = model.vocab_size();
    std::vector<std::size_t> n_k(K, 0), z(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        std::size_t k = rng.next_index(K);
        z[i] = k;
        ++n_k[k];
    }

    std::vector<double> cum(K);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const std::size_t v = ids[i];
            --n_k[z[i]];
            double total = 0;
            for (std::size_t k = 0; k < K; ++k) {
                double p = model.topic_word[k * V + v] *
                           (static_cast<double>(n_k[k]) + model.alpha);
                total += p;
                cum[k] = total;
            }
            z[i] = detail::sample_cumulative(cum, rng);
            ++n_k[z[i]];
        }
    }

    TopicDistribution dist;
    dist.probs.resize(K);
    const double denom = static_cast<double>(ids.size()) +
                         static_cast<double>(K) * model.alpha;
    double sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
        dist.probs[k] = (static_cast<double>(n_k[k]) + model.alpha) / denom;
        sum += dist.probs[k];
    }
    for (double& p : dist.probs) p /= sum;
    return dist;
}

} // namespace viewdiv
