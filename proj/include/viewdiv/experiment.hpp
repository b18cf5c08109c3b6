#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "viewdiv/config.hpp"
#include "viewdiv/corpus.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/distances.hpp"
#include "viewdiv/enrichment.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/metrics.hpp"
#include "viewdiv/mmr.hpp"
#include "viewdiv/tfidf.hpp"

namespace viewdiv {

// ---------------------------------------------------------------------
// k-fold split
// ---------------------------------------------------------------------

// Seeded shuffle followed by round-robin assignment; fold sizes differ
// by at most one and the folds partition the input.
inline std::vector<std::vector<std::string>> kfold_split(std::vector<std::string> ids, int k,
                                                         std::uint64_t seed) {
    if (k < 2) throw ConfigError("kfold_split: k must be >= 2");
    if (static_cast<std::size_t>(k) > ids.size())
        throw ConfigError("kfold_split: k=" + std::to_string(k) + " exceeds corpus size " +
                          std::to_string(ids.size()));
    detail::Rng rng(detail::mix_seed(seed, "kfold"));
    detail::shuffle(ids, rng);
    std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < ids.size(); ++i)
        folds[i % static_cast<std::size_t>(k)].push_back(std::move(ids[i]));
    return folds;
}

// ---------------------------------------------------------------------
// Annotation setup and cached pipeline state
// ---------------------------------------------------------------------

struct AnnotatorSetup {
    enum class Mode { builtin, sidecar };
    Mode mode = Mode::builtin;
    Normalizer normalizer;
    Taxonomy taxonomy;
    SentimentLexicon sentiment;
    CueLexicon cues;
    SidecarAnnotations sidecar;
};

// One (x, y) segmentation's enrichment of the whole corpus, plus the
// signals the evaluation metric reads.
struct EnrichmentVariant {
    std::vector<EnrichedArticle> articles; // corpus order
    std::unordered_map<std::string, ViewpointSignals> signals;
};

// Everything the experiment computes at most once per corpus: the
// trained topic model, the shared tokenization, the TF-IDF relevance
// matrix and, lazily, the enrichment and aspect matrices per (x, y,
// level scheme). prepare() must be called from a single thread before
// the cached entries are read concurrently.
class ExperimentContext {
public:
    ExperimentContext(const Corpus& corpus, const AnnotatorSetup& setup, const ModelConfig& base,
                      int threads = 1)
        : corpus_(corpus), base_(base), threads_(threads),
          doc_tokens_(tokenize_corpus(corpus, setup.normalizer)),
          source_(make_source(doc_tokens_, setup, base)) {
        index_ = std::make_unique<TfIdfIndex>(TfIdfIndex::build(corpus_.ids(), doc_tokens_));
        relevance_ = index_->relevance_matrix();
    }

    const Corpus& corpus() const { return corpus_; }
    const ModelConfig& base_config() const { return base_; }
    const TfIdfIndex& tfidf() const { return *index_; }
    const PairMatrix& relevance() const { return relevance_; }
    const std::vector<std::vector<std::string>>& doc_tokens() const { return doc_tokens_; }
    int threads() const { return threads_; }

    void prepare(int x, int y, LevelScheme scheme) {
        const EnrichmentVariant& variant = ensure_variant(x, y);
        auto key = std::make_tuple(x, y, scheme);
        if (aspects_.count(key)) return;
        aspects_.emplace(key, aspect_matrices(variant.articles, LevelWeights{scheme},
                                              base_.kl_eps, base_.moral_aggregate));
    }

    const EnrichmentVariant& variant(int x, int y) const {
        auto it = variants_.find({x, y});
        if (it == variants_.end())
            throw Error("internal: enrichment variant (" + std::to_string(x) + ", " +
                        std::to_string(y) + ") not prepared");
        return it->second;
    }

    const AspectMatrices& aspects(int x, int y, LevelScheme scheme) const {
        auto it = aspects_.find(std::make_tuple(x, y, scheme));
        if (it == aspects_.end())
            throw Error("internal: aspect matrices not prepared");
        return it->second;
    }

private:
    static std::vector<std::vector<std::string>> tokenize_corpus(const Corpus& corpus,
                                                                 const Normalizer& norm) {
        std::vector<std::vector<std::string>> docs;
        docs.reserve(corpus.size());
        for (const auto& article : corpus) {
            std::string text = article.title;
            for (const auto& p : article.paragraphs) {
                text += '\n';
                text += p;
            }
            docs.push_back(preprocess(text, norm));
        }
        return docs;
    }

    // The topic model plays the role of a fixed, externally trained
    // model: trained once over the whole corpus, then applied per
    // segmentation.
    static AnnotationSource make_source(const std::vector<std::vector<std::string>>& docs,
                                        const AnnotatorSetup& setup, const ModelConfig& base) {
        if (setup.mode == AnnotatorSetup::Mode::sidecar)
            return AnnotationSource::sidecar(setup.sidecar);

        BuiltinAnnotators ann;
        ann.model = train_topic_model(docs, base.topics, base.alpha, base.beta,
                                      base.train_iterations, base.seed);
        ann.taxonomy = setup.taxonomy;
        ann.sentiment = setup.sentiment;
        ann.cues = setup.cues;
        ann.normalizer = setup.normalizer;
        ann.inference_sweeps = base.inference_sweeps;
        return AnnotationSource::builtin(std::move(ann));
    }

    const EnrichmentVariant& ensure_variant(int x, int y) {
        auto it = variants_.find({x, y});
        if (it != variants_.end()) return it->second;

        EnrichmentVariant variant;
        variant.articles.resize(corpus_.size());
        detail::parallel_for(corpus_.size(), threads_, [&](std::size_t i) {
            StructuredArticle sa = segment(corpus_.at(i), x, y);
            variant.articles[i] = source_.enrich_article(sa, base_.seed);
        });
        for (std::size_t i = 0; i < corpus_.size(); ++i) {
            const Article& article = corpus_.at(i);
            const EnrichedArticle& enriched = variant.articles[i];
            ViewpointSignals sig;
            if (!article.channels.empty()) {
                sig.channels = article.channels;
            } else {
                // no platform channels: fall back to level-1 categories
                auto l1 = enriched.level1_categories();
                sig.channels.insert(l1.begin(), l1.end());
            }
            sig.topics = enriched.topic_dist;
            variant.signals.emplace(article.id, std::move(sig));
        }
        return variants_.emplace(std::make_pair(x, y), std::move(variant)).first->second;
    }

    const Corpus& corpus_;
    ModelConfig base_;
    int threads_;
    std::vector<std::vector<std::string>> doc_tokens_; // initialized before source_
    AnnotationSource source_;
    std::unique_ptr<TfIdfIndex> index_;
    PairMatrix relevance_;
    std::map<std::pair<int, int>, EnrichmentVariant> variants_;
    std::map<std::tuple<int, int, LevelScheme>, AspectMatrices> aspects_;
};

// ---------------------------------------------------------------------
// Pool-scoped diversity
// ---------------------------------------------------------------------

inline PairMatrix submatrix(const PairMatrix& m, std::span<const std::string> ids) {
    PairMatrix out(std::vector<std::string>(ids.begin(), ids.end()), m.kind());
    std::vector<std::size_t> src;
    src.reserve(ids.size());
    for (const auto& id : ids) src.push_back(m.index_of(id));
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < src.size(); ++j) out.at(i, j) = m.at(src[i], src[j]);
    return out;
}

// Min-max fit over the candidate pool (the default) or inherited from
// the full matrix when `globally_normalized` inputs are passed in.
inline PairMatrix pooled_diversity(const AspectMatrices& aspects,
                                   std::span<const std::string> pool_ids,
                                   const AspectWeights& weights, bool already_normalized) {
    PairMatrix pd = submatrix(aspects.pd, pool_ids);
    PairMatrix ca = submatrix(aspects.ca, pool_ids);
    PairMatrix me = submatrix(aspects.me, pool_ids);
    PairMatrix tr = submatrix(aspects.tr, pool_ids);
    if (!already_normalized) {
        pd = normalize_minmax(pd);
        ca = normalize_minmax(ca);
        me = normalize_minmax(me);
        tr = normalize_minmax(tr);
    }
    return combine(pd, ca, me, tr, weights);
}

// ---------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------

struct GridSearchOptions {
    int threads = 1;
    bool normalize_globally = false;
};

// Exhaustive search over candidate configurations. The objective is the
// mean intra-list viewpoint diversity of the lambda = 0 lists over the
// training articles (each re-ranked against the other training
// articles); ties resolve to the earliest candidate.
inline ModelConfig grid_search(ExperimentContext& ctx, std::span<const std::string> train_ids,
                               std::span<const ModelConfig> grid,
                               const GridSearchOptions& opt = {}) {
    if (grid.empty()) throw ConfigError("grid_search: empty grid");
    if (train_ids.size() < 2) throw ConfigError("grid_search: need at least 2 training ids");

    // group configs sharing (x, y, scheme) so the normalized pool
    // matrices are computed once per group
    std::map<std::tuple<int, int, LevelScheme>, std::vector<std::size_t>> groups;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        grid[g].validate();
        groups[{grid[g].x, grid[g].y, grid[g].level_weights.scheme}].push_back(g);
    }
    for (const auto& [key, members] : groups)
        ctx.prepare(std::get<0>(key), std::get<1>(key), std::get<2>(key));

    struct Group {
        std::tuple<int, int, LevelScheme> key;
        const std::vector<std::size_t>* members;
        // set in global-fit mode: min-max fitted on the full matrices
        std::unique_ptr<AspectMatrices> global_norm;
    };
    std::vector<Group> group_list;
    for (const auto& [key, members] : groups) {
        Group g{key, &members, nullptr};
        if (opt.normalize_globally) {
            const auto& full = ctx.aspects(std::get<0>(key), std::get<1>(key), std::get<2>(key));
            g.global_norm = std::make_unique<AspectMatrices>(
                AspectMatrices{normalize_minmax(full.pd), normalize_minmax(full.ca),
                               normalize_minmax(full.me), normalize_minmax(full.tr)});
        }
        group_list.push_back(std::move(g));
    }

    std::vector<std::vector<double>> per_anchor(train_ids.size());
    detail::parallel_for(train_ids.size(), opt.threads, [&](std::size_t a) {
        const std::string& anchor = train_ids[a];
        std::vector<std::string> pool;
        pool.reserve(train_ids.size() - 1);
        for (const auto& id : train_ids)
            if (id != anchor) pool.push_back(id);

        std::vector<double> scores(grid.size(), 0.0);
        for (const auto& group : group_list) {
            const auto [x, y, scheme] = group.key;
            const AspectMatrices& full =
                group.global_norm ? *group.global_norm : ctx.aspects(x, y, scheme);
            AspectMatrices norm{submatrix(full.pd, pool), submatrix(full.ca, pool),
                                submatrix(full.me, pool), submatrix(full.tr, pool)};
            if (!opt.normalize_globally) {
                norm.pd = normalize_minmax(norm.pd);
                norm.ca = normalize_minmax(norm.ca);
                norm.me = normalize_minmax(norm.me);
                norm.tr = normalize_minmax(norm.tr);
            }
            const auto& signals = ctx.variant(x, y).signals;
            for (std::size_t g : *group.members) {
                PairMatrix div = combine(norm.pd, norm.ca, norm.me, norm.tr,
                                         grid[g].aspect_weights);
                RankedList list = mmr_rerank(anchor, pool, ctx.relevance(), div, 0.0,
                                             static_cast<std::size_t>(grid[g].list_size));
                scores[g] = ild_viewpoint(list.items, signals, grid[g].kl_eps);
            }
        }
        per_anchor[a] = std::move(scores);
    });

    std::vector<double> mean_scores(grid.size(), 0.0);
    for (const auto& scores : per_anchor)
        for (std::size_t g = 0; g < grid.size(); ++g) mean_scores[g] += scores[g];

    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (mean_scores[g] > mean_scores[best]) best = g;
    return grid[best];
}

// ---------------------------------------------------------------------
// Full protocol: cross-validated grid search + lambda sweep
// ---------------------------------------------------------------------

struct ExperimentOptions {
    std::vector<double> lambda_sweep = default_lambda_sweep();
    bool run_grid_search = true; // false: run the base config verbatim
    int threads = 1;
    bool normalize_globally = false;
    std::vector<std::string> query_tokens; // non-empty: pre-filter the candidate pool
    std::size_t query_pool = 0;            // keep this many top-scoring articles; 0 = all
};

struct MeanSe {
    double mean = 0;
    double se = 0;
};

inline MeanSe mean_se(std::span<const double> xs) {
    MeanSe out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
             std::sqrt(static_cast<double>(xs.size()));
    return out;
}

struct LambdaAggregate {
    MetricRecord record; // means; publisher ratios pooled over all lists
    double ild_se = 0;
    double relevance_se = 0;
    double tau_se = 0;
    double words_se = 0;
    double distinct_se = 0;
    std::size_t lists = 0;
};

struct FoldResult {
    std::size_t fold = 0;
    std::vector<std::string> test_ids;
    ModelConfig config; // grid-search winner, or the fixed config
};

struct ExperimentReport {
    std::vector<LambdaAggregate> per_lambda; // ascending lambda
    std::vector<FoldResult> folds;
    std::uint64_t seed = 0;
    std::string corpus_hash;
    std::size_t corpus_size = 0;
    bool query_all_oov = false; // set when a query pre-filter matched nothing
};

inline ExperimentReport run_experiment(const Corpus& corpus, const AnnotatorSetup& setup,
                                       const ModelConfig& base, const ExperimentOptions& opt) {
    base.validate();
    std::vector<double> sweep = opt.lambda_sweep;
    validate_lambda_sweep(sweep);
    std::sort(sweep.begin(), sweep.end());
    sweep.erase(std::unique(sweep.begin(), sweep.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                sweep.end());
    if (corpus.size() < 3) throw ValidationError("experiment: corpus too small");

    ExperimentContext ctx(corpus, setup, base, opt.threads);

    // candidate pool, optionally narrowed by a handcrafted query
    ExperimentReport report;
    std::vector<std::string> global_pool = corpus.ids();
    if (!opt.query_tokens.empty()) {
        auto q = ctx.tfidf().query_relevance(opt.query_tokens);
        report.query_all_oov = q.all_oov;
        if (opt.query_pool > 0 && opt.query_pool < global_pool.size()) {
            std::vector<std::size_t> order(global_pool.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (q.scores[a] != q.scores[b]) return q.scores[a] > q.scores[b];
                return global_pool[a] < global_pool[b];
            });
            order.resize(opt.query_pool);
            std::sort(order.begin(), order.end()); // keep corpus order in the pool
            std::vector<std::string> kept;
            kept.reserve(order.size());
            for (std::size_t i : order) kept.push_back(global_pool[i]);
            global_pool = std::move(kept);
        }
    }

    const auto folds = kfold_split(corpus.ids(), base.folds, base.seed);
    std::vector<ModelConfig> grid;
    if (opt.run_grid_search)
        grid = table_grid(base);

    struct ListEvaluation {
        double ild = 0, rel = 0, tau = 0, words = 0;
        RankedList top;
    };
    // samples[lambda][list-slot], filled in a fixed (fold, anchor) order.
    // slot_used is std::vector<char>: adjacent slots are written from
    // different threads and vector<bool> packs bits.
    std::vector<std::vector<ListEvaluation>> samples(sweep.size());
    for (auto& s : samples) s.resize(corpus.size());
    std::vector<char> slot_used(corpus.size(), 0);
    std::size_t slot_base = 0;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& test_ids = folds[f];
        std::vector<std::string> train_ids;
        std::unordered_set<std::string> test_set(test_ids.begin(), test_ids.end());
        for (const auto& id : corpus.ids())
            if (!test_set.count(id)) train_ids.push_back(id);

        ModelConfig chosen = base;
        if (opt.run_grid_search) {
            GridSearchOptions gopt;
            gopt.threads = opt.threads;
            gopt.normalize_globally = opt.normalize_globally;
            chosen = grid_search(ctx, train_ids, grid, gopt);
        }
        ctx.prepare(chosen.x, chosen.y, chosen.level_weights.scheme);
        report.folds.push_back({f, test_ids, chosen});

        const AspectMatrices& full =
            ctx.aspects(chosen.x, chosen.y, chosen.level_weights.scheme);
        const auto& signals = ctx.variant(chosen.x, chosen.y).signals;

        std::unique_ptr<AspectMatrices> global_norm;
        if (opt.normalize_globally)
            global_norm = std::make_unique<AspectMatrices>(
                AspectMatrices{normalize_minmax(full.pd), normalize_minmax(full.ca),
                               normalize_minmax(full.me), normalize_minmax(full.tr)});

        detail::parallel_for(test_ids.size(), opt.threads, [&](std::size_t t) {
            const std::string& anchor = test_ids[t];
            std::vector<std::string> pool;
            pool.reserve(global_pool.size());
            for (const auto& id : global_pool)
                if (id != anchor) pool.push_back(id);
            if (pool.empty()) return;

            PairMatrix div = global_norm
                                 ? pooled_diversity(*global_norm, pool, chosen.aspect_weights,
                                                    /*already_normalized=*/true)
                                 : pooled_diversity(full, pool, chosen.aspect_weights,
                                                    /*already_normalized=*/false);

            RankedList baseline_full =
                baseline_rerank(anchor, pool, ctx.relevance(), pool.size());
            const std::size_t s = static_cast<std::size_t>(chosen.list_size);
            for (std::size_t li = 0; li < sweep.size(); ++li) {
                const double lambda = sweep[li];
                RankedList full_list =
                    lambda == 1.0
                        ? baseline_full
                        : mmr_rerank(anchor, pool, ctx.relevance(), div, lambda, pool.size());

                RankedList top = full_list;
                const std::size_t keep = std::min(s, top.items.size());
                top.items.resize(keep);
                top.scores.resize(keep);
                top.s = s;

                ListEvaluation ev;
                ev.top = top;
                ev.ild = ild_viewpoint(top.items, signals, chosen.kl_eps);
                double rel_sum = 0;
                for (const auto& id : top.items)
                    rel_sum += ctx.relevance().between(id, anchor);
                ev.rel = top.items.empty() ? 0 : rel_sum / static_cast<double>(top.items.size());
                ev.tau = kendall_tau(full_list.items, baseline_full.items);
                ev.words = avg_words(top, corpus);
                samples[li][slot_base + t] = std::move(ev);
            }
            slot_used[slot_base + t] = 1;
        });
        slot_base += test_ids.size();
    }

    // aggregate in slot order; identical for any thread count
    for (std::size_t li = 0; li < sweep.size(); ++li) {
        std::vector<double> ild, rel, tau, words;
        std::vector<RankedList> lists;
        for (std::size_t slot = 0; slot < slot_base; ++slot) {
            if (!slot_used[slot]) continue;
            const auto& ev = samples[li][slot];
            ild.push_back(ev.ild);
            rel.push_back(ev.rel);
            tau.push_back(ev.tau);
            words.push_back(ev.words);
            lists.push_back(ev.top);
        }
        if (lists.empty()) throw ValidationError("experiment: no evaluable anchors");

        PublisherStats pubs = publisher_ratio(lists, corpus);
        std::vector<double> distinct;
        distinct.reserve(lists.size());
        for (const auto& list : lists) {
            std::set<std::string> seen;
            for (const auto& id : list.items) seen.insert(corpus.by_id(id).publisher);
            distinct.push_back(static_cast<double>(seen.size()));
        }

        LambdaAggregate agg;
        agg.record.lambda = sweep[li];
        MeanSe m;
        m = mean_se(ild);
        agg.record.ild_diversity = m.mean;
        agg.ild_se = m.se;
        m = mean_se(rel);
        agg.record.mean_relevance = m.mean;
        agg.relevance_se = m.se;
        m = mean_se(tau);
        agg.record.kendall_tau = m.mean;
        agg.tau_se = m.se;
        m = mean_se(words);
        agg.record.avg_words = m.mean;
        agg.words_se = m.se;
        m = mean_se(distinct);
        agg.record.distinct_publishers = m.mean;
        agg.distinct_se = m.se;
        agg.record.publisher_ratios = pubs.ratios;
        agg.lists = lists.size();
        report.per_lambda.push_back(std::move(agg));
    }

    report.seed = base.seed;
    report.corpus_hash = corpus_hash(corpus);
    report.corpus_size = corpus.size();
    return report;
}

// ---------------------------------------------------------------------
// Report export
// ---------------------------------------------------------------------

// Writes metrics.csv, publishers.csv and report.json. Reruns with the
// same seed produce byte-identical files.
inline void export_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    if (report.per_lambda.empty())
        throw ValidationError("export_report: report has no lambda rows");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };

    {
        auto out = open("metrics.csv");
        out << "lambda,ild_diversity,ild_diversity_se,mean_relevance,mean_relevance_se,"
               "kendall_tau,kendall_tau_se,avg_words,avg_words_se,"
               "distinct_publishers,distinct_publishers_se\n";
        for (const auto& agg : report.per_lambda) {
            const auto& r = agg.record;
            out << detail::format_g12(r.lambda) << ',' << detail::format_g12(r.ild_diversity)
                << ',' << detail::format_g12(agg.ild_se) << ','
                << detail::format_g12(r.mean_relevance) << ','
                << detail::format_g12(agg.relevance_se) << ','
                << detail::format_g12(r.kendall_tau) << ',' << detail::format_g12(agg.tau_se)
                << ',' << detail::format_g12(r.avg_words) << ','
                << detail::format_g12(agg.words_se) << ','
                << detail::format_g12(r.distinct_publishers) << ','
                << detail::format_g12(agg.distinct_se) << '\n';
        }
    }
    {
        auto out = open("publishers.csv");
        out << "lambda,publisher,ratio\n";
        for (const auto& agg : report.per_lambda)
            for (const auto& [publisher, ratio] : agg.record.publisher_ratios)
                out << detail::format_g12(agg.record.lambda) << ',' << publisher << ','
                    << detail::format_g12(ratio) << '\n';
    }
    {
        auto out = open("report.json");
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& fold : report.folds)
            folds.push_back({{"fold", fold.fold},
                             {"test_ids", fold.test_ids},
                             {"config", model_config_to_json(fold.config)}});
        nlohmann::json j = {{"seed", report.seed},
                            {"corpus_hash", report.corpus_hash},
                            {"corpus_size", report.corpus_size},
                            {"query_all_oov", report.query_all_oov},
                            {"folds", folds}};
        out << j.dump(2) << '\n';
    }
}

} // namespace viewdiv
