// viewdiv: framing-aspect viewpoint diversification for news
// recommendation lists.
//
// Subcommands wire the pipeline end to end: validate -> enrich ->
// matrix -> rerank -> evaluate -> experiment. Machine-readable results
// go to stdout (or files), human summaries to stderr. Exit codes:
// 0 ok, 1 usage/config error, 2 data error, 3 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viewdiv/config.hpp"
#include "viewdiv/corpus.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/distances.hpp"
#include "viewdiv/enrichment.hpp"
#include "viewdiv/errors.hpp"
#include "viewdiv/experiment.hpp"
#include "viewdiv/metrics.hpp"
#include "viewdiv/mmr.hpp"
#include "viewdiv/synthetic.hpp"
#include "viewdiv/tfidf.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------
// file loading
// ---------------------------------------------------------------------

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw viewdiv::ParseError("cannot open file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw viewdiv::ParseError(path.string() + ": " + e.what());
    }
}

viewdiv::Corpus load_corpus(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw viewdiv::ParseError("cannot open corpus '" + path.string() + "'");
    return viewdiv::parse_corpus(in);
}

// Errors raised while reading a resource file are data errors carrying
// the file name, whatever their original type.
template <typename Fn>
auto load_resource(const fs::path& path, Fn&& fn) {
    try {
        return fn(load_json_file(path));
    } catch (const viewdiv::ParseError&) {
        throw;
    } catch (const viewdiv::Error& e) {
        throw viewdiv::ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------
// run settings (config file + flag overrides)
// ---------------------------------------------------------------------

struct AnnotatorPaths {
    std::string mode = "builtin";
    std::string taxonomy;
    std::string sentiment;
    std::string stopwords;
    std::string cues;
    std::string lemmas;
    std::string sidecar;
    bool lowercase = true;
};

struct RunSettings {
    std::string corpus;
    AnnotatorPaths annotators;
    viewdiv::ModelConfig model;
    bool grid_search = true;
    std::vector<double> lambda_sweep = viewdiv::default_lambda_sweep();
    std::size_t min_words = viewdiv::kDefaultMinWords;
    std::size_t min_paragraphs = viewdiv::kDefaultMinParagraphs;
    bool normalize_globally = false;
    std::string query_terms;
    std::size_t query_pool = 0;
    std::string output_dir = "out";
};

RunSettings load_settings(const fs::path& config_path) {
    json j = load_json_file(config_path);
    const fs::path base = config_path.parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path path(p);
        return path.is_absolute() ? path.string() : (base / path).string();
    };

    RunSettings s;
    try {
        s.corpus = resolve(j.at("corpus").get<std::string>());
        if (j.contains("annotators")) {
            const auto& a = j.at("annotators");
            s.annotators.mode = a.value("mode", s.annotators.mode);
            s.annotators.taxonomy = resolve(a.value("taxonomy", std::string()));
            s.annotators.sentiment = resolve(a.value("sentiment_lexicon", std::string()));
            s.annotators.stopwords = resolve(a.value("stopwords", std::string()));
            s.annotators.cues = resolve(a.value("cues", std::string()));
            s.annotators.lemmas = resolve(a.value("lemmas", std::string()));
            s.annotators.sidecar = resolve(a.value("sidecar", std::string()));
            s.annotators.lowercase = a.value("lowercase", true);
        }
        if (j.contains("model")) s.model = viewdiv::model_config_from_json(j.at("model"));
        s.grid_search = j.value("grid_search", s.grid_search);
        if (j.contains("lambda_sweep"))
            s.lambda_sweep = j.at("lambda_sweep").get<std::vector<double>>();
        s.min_words = j.value("min_words", s.min_words);
        s.min_paragraphs = j.value("min_paragraphs", s.min_paragraphs);
        s.normalize_globally = j.value("normalize_globally", s.normalize_globally);
        if (j.contains("query")) {
            s.query_terms = j.at("query").value("terms", std::string());
            s.query_pool = j.at("query").value("pool", std::size_t{0});
        }
        if (j.contains("output_dir"))
            s.output_dir = resolve(j.at("output_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw viewdiv::ConfigError(config_path.string() + ": " + e.what());
    }
    if (s.annotators.mode != "builtin" && s.annotators.mode != "sidecar")
        throw viewdiv::ConfigError("annotator mode must be 'builtin' or 'sidecar'");
    viewdiv::validate_lambda_sweep(s.lambda_sweep);
    return s;
}

viewdiv::AnnotatorSetup load_annotators(const AnnotatorPaths& paths) {
    viewdiv::AnnotatorSetup setup;
    setup.normalizer.lowercase = paths.lowercase;
    if (!paths.stopwords.empty())
        setup.normalizer.stop_words = load_resource(paths.stopwords, [](const json& j) {
            std::unordered_set<std::string> words;
            for (const auto& w : j) words.insert(w.get<std::string>());
            return words;
        });
    if (!paths.lemmas.empty())
        setup.normalizer.lemmas = load_resource(paths.lemmas, [](const json& j) {
            std::unordered_map<std::string, std::string> lemmas;
            for (auto it = j.begin(); it != j.end(); ++it)
                lemmas[it.key()] = it.value().get<std::string>();
            return lemmas;
        });

    if (paths.mode == "sidecar") {
        setup.mode = viewdiv::AnnotatorSetup::Mode::sidecar;
        if (paths.sidecar.empty())
            throw viewdiv::ConfigError("sidecar mode requires a sidecar path");
        std::ifstream in(paths.sidecar);
        if (!in)
            throw viewdiv::ParseError("cannot open sidecar '" + paths.sidecar + "'");
        setup.sidecar = viewdiv::SidecarAnnotations::parse(in);
        return setup;
    }

    setup.mode = viewdiv::AnnotatorSetup::Mode::builtin;
    if (paths.taxonomy.empty() || paths.sentiment.empty() || paths.cues.empty())
        throw viewdiv::ConfigError(
            "builtin mode requires taxonomy, sentiment_lexicon and cues paths");
    setup.taxonomy = load_resource(paths.taxonomy, viewdiv::Taxonomy::from_json);
    setup.sentiment =
        load_resource(paths.sentiment, viewdiv::SentimentLexicon::from_json);
    setup.cues = load_resource(paths.cues, viewdiv::CueLexicon::from_json);
    return setup;
}

// Applies the corpus filters; dropped articles are reported on stderr.
viewdiv::Corpus filtered_corpus(const viewdiv::Corpus& corpus, std::size_t min_words,
                                std::size_t min_paragraphs) {
    std::vector<viewdiv::Article> kept;
    std::size_t dropped = 0;
    for (const auto& a : corpus) {
        if (viewdiv::validate_article(a, min_words, min_paragraphs).accepted)
            kept.push_back(a);
        else
            ++dropped;
    }
    if (dropped > 0)
        std::cerr << "filtered out " << dropped << " article(s) below thresholds\n";
    return viewdiv::Corpus(std::move(kept));
}

viewdiv::ExperimentOptions experiment_options(const RunSettings& s, int threads) {
    viewdiv::ExperimentOptions opt;
    opt.lambda_sweep = s.lambda_sweep;
    opt.run_grid_search = s.grid_search;
    opt.threads = threads;
    opt.normalize_globally = s.normalize_globally;
    if (!s.query_terms.empty()) {
        viewdiv::Normalizer norm; // query terms are matched post-normalization
        norm.lowercase = s.annotators.lowercase;
        opt.query_tokens = viewdiv::preprocess(s.query_terms, norm);
        opt.query_pool = s.query_pool;
    }
    return opt;
}

void print_summary_table(const viewdiv::ExperimentReport& report, std::ostream& out) {
    out << "lambda  ild_diversity  mean_relevance  kendall_tau  avg_words  distinct_pub\n";
    for (const auto& agg : report.per_lambda) {
        const auto& r = agg.record;
        char line[160];
        std::snprintf(line, sizeof(line), "%-7.1f %-14.4f %-15.4f %-12.4f %-10.1f %-12.2f\n",
                      r.lambda, r.ild_diversity, r.mean_relevance, r.kendall_tau, r.avg_words,
                      r.distinct_publishers);
        out << line;
    }
}

// ---------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------

int cmd_validate(const std::string& corpus_path, std::size_t min_words,
                 std::size_t min_paragraphs) {
    viewdiv::Corpus corpus = load_corpus(corpus_path);
    json accepted = json::array();
    json rejected = json::array();
    std::map<std::string, std::size_t> per_channel;
    std::size_t n_accepted = 0;
    for (const auto& a : corpus) {
        auto result = viewdiv::validate_article(a, min_words, min_paragraphs);
        if (result.accepted) {
            accepted.push_back(a.id);
            ++n_accepted;
            for (const auto& c : a.channels) ++per_channel[c];
        } else {
            rejected.push_back({{"id", a.id}, {"reason", result.reason}});
        }
    }
    std::cout << json{{"accepted", accepted}, {"rejected", rejected}}.dump() << "\n";
    std::cerr << "accepted: " << n_accepted << "\n";
    std::cerr << "rejected: " << rejected.size() << "\n";
    for (const auto& [channel, count] : per_channel)
        std::cerr << "  " << channel << ": " << count << "\n";
    return 0;
}

int cmd_enrich(const RunSettings& s, const std::string& out_path, int threads) {
    viewdiv::Corpus corpus =
        filtered_corpus(load_corpus(s.corpus), s.min_words, s.min_paragraphs);
    if (corpus.empty()) throw viewdiv::ValidationError("no articles left after filtering");
    viewdiv::AnnotatorSetup setup = load_annotators(s.annotators);
    viewdiv::ExperimentContext ctx(corpus, setup, s.model, threads);
    ctx.prepare(s.model.x, s.model.y, s.model.level_weights.scheme);
    const auto& enriched = ctx.variant(s.model.x, s.model.y).articles;

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw viewdiv::Error("cannot write '" + out_path + "'");
    viewdiv::write_sidecar(enriched, out);
    std::cerr << "enriched " << enriched.size() << " article(s) -> " << out_path << "\n";
    return 0;
}

int cmd_matrix(const RunSettings& s, const std::string& out_dir, int threads) {
    viewdiv::Corpus corpus =
        filtered_corpus(load_corpus(s.corpus), s.min_words, s.min_paragraphs);
    if (corpus.size() < 2) throw viewdiv::ValidationError("need at least 2 articles");
    viewdiv::AnnotatorSetup setup = load_annotators(s.annotators);
    viewdiv::ExperimentContext ctx(corpus, setup, s.model, threads);
    ctx.prepare(s.model.x, s.model.y, s.model.level_weights.scheme);
    const auto& aspects = ctx.aspects(s.model.x, s.model.y, s.model.level_weights.scheme);

    fs::create_directories(out_dir);
    auto write = [&](const viewdiv::PairMatrix& m, const char* name) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw viewdiv::Error(std::string("cannot write ") + name);
        m.to_csv(out);
    };
    write(aspects.pd, "aspect_problem_definition.csv");
    write(aspects.ca, "aspect_causal_attribution.csv");
    write(aspects.me, "aspect_moral_evaluation.csv");
    write(aspects.tr, "aspect_treatment_recommendation.csv");
    // the combined matrix is exported with a corpus-wide min-max fit
    viewdiv::PairMatrix diversity = viewdiv::combine(
        viewdiv::normalize_minmax(aspects.pd), viewdiv::normalize_minmax(aspects.ca),
        viewdiv::normalize_minmax(aspects.me), viewdiv::normalize_minmax(aspects.tr),
        s.model.aspect_weights);
    write(diversity, "diversity.csv");
    write(ctx.relevance(), "relevance.csv");
    std::cerr << "wrote 6 matrices for " << corpus.size() << " article(s) to " << out_dir
              << "\n";
    return 0;
}

int cmd_rerank(const RunSettings& s, const std::string& anchor, double lambda, int list_size,
               int threads) {
    viewdiv::Corpus corpus =
        filtered_corpus(load_corpus(s.corpus), s.min_words, s.min_paragraphs);
    if (!corpus.find(anchor))
        throw viewdiv::LookupError("unknown anchor id '" + anchor + "'");
    if (corpus.size() < 2) throw viewdiv::ValidationError("need at least 2 articles");

    viewdiv::AnnotatorSetup setup = load_annotators(s.annotators);
    viewdiv::ExperimentContext ctx(corpus, setup, s.model, threads);
    ctx.prepare(s.model.x, s.model.y, s.model.level_weights.scheme);
    const auto& aspects = ctx.aspects(s.model.x, s.model.y, s.model.level_weights.scheme);

    std::vector<std::string> pool;
    for (const auto& id : corpus.ids())
        if (id != anchor) pool.push_back(id);

    viewdiv::PairMatrix div =
        viewdiv::pooled_diversity(aspects, pool, s.model.aspect_weights, false);
    viewdiv::RankedList list = viewdiv::mmr_rerank(anchor, pool, ctx.relevance(), div, lambda,
                                                   static_cast<std::size_t>(list_size));
    std::cout << viewdiv::ranked_list_to_json(list, corpus).dump() << "\n";
    return 0;
}

int cmd_evaluate(const RunSettings& s, const std::string& out_dir, int threads) {
    viewdiv::Corpus corpus =
        filtered_corpus(load_corpus(s.corpus), s.min_words, s.min_paragraphs);
    viewdiv::AnnotatorSetup setup = load_annotators(s.annotators);
    s.model.validate();

    viewdiv::ExperimentOptions opt = experiment_options(s, threads);
    opt.run_grid_search = false; // evaluate runs the configured model verbatim
    viewdiv::ExperimentReport report = viewdiv::run_experiment(corpus, setup, s.model, opt);

    std::vector<viewdiv::MetricRecord> records;
    for (const auto& agg : report.per_lambda) records.push_back(agg.record);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "evaluation.csv", std::ios::binary);
        if (!out) throw viewdiv::Error("cannot write evaluation.csv");
        viewdiv::metric_records_to_csv(records, out);
        std::cerr << "wrote " << (fs::path(out_dir) / "evaluation.csv").string() << "\n";
    } else {
        viewdiv::metric_records_to_csv(records, std::cout);
    }
    print_summary_table(report, std::cerr);
    return 0;
}

int cmd_experiment(const RunSettings& s, int threads) {
    viewdiv::Corpus corpus =
        filtered_corpus(load_corpus(s.corpus), s.min_words, s.min_paragraphs);
    viewdiv::AnnotatorSetup setup = load_annotators(s.annotators);
    s.model.validate_experiment_domain(/*searched_fields_fixed=*/!s.grid_search);

    viewdiv::ExperimentOptions opt = experiment_options(s, threads);
    viewdiv::ExperimentReport report = viewdiv::run_experiment(corpus, setup, s.model, opt);
    viewdiv::export_report(report, s.output_dir);

    print_summary_table(report, std::cout);
    std::cerr << "corpus " << report.corpus_hash << ", " << report.corpus_size
              << " article(s), " << report.folds.size() << " fold(s); results in "
              << s.output_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Viewpoint diversification for news recommendation lists"};
    app.require_subcommand(1);
    // global flags may appear before or after the subcommand
    app.fallthrough();

    std::uint64_t seed = 42;
    int threads = viewdiv::detail::default_thread_count();
    app.add_option("--seed", seed, "Seed for every random draw");
    app.add_option("--threads", threads, "Worker threads (1 = serial; results identical)");

    std::string corpus_path, config_path, out_path, out_dir, anchor;
    std::size_t min_words = viewdiv::kDefaultMinWords;
    std::size_t min_paragraphs = viewdiv::kDefaultMinParagraphs;
    double lambda = 0.0;
    int list_size = 3;

    auto add_config = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--config", config_path,
                                    "Run configuration (JSON; schema in README)");
        if (required) opt->required();
        return opt;
    };
    auto add_corpus_override = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", corpus_path, "Corpus file (overrides config)");
    };

    CLI::App* validate = app.add_subcommand("validate", "Apply the corpus filters");
    validate->add_option("--corpus", corpus_path, "Corpus file (JSON lines)")->required();
    validate->add_option("--min-words", min_words, "Minimum word count");
    validate->add_option("--min-paragraphs", min_paragraphs, "Minimum paragraph count");

    CLI::App* enrich = app.add_subcommand("enrich", "Write framing metadata as a sidecar file");
    add_config(enrich, true);
    add_corpus_override(enrich);
    enrich->add_option("--out", out_path, "Sidecar output path")->required();

    CLI::App* matrix = app.add_subcommand("matrix", "Export aspect/diversity/relevance matrices");
    add_config(matrix, true);
    add_corpus_override(matrix);
    matrix->add_option("--out-dir", out_dir, "Output directory")->required();

    CLI::App* rerank = app.add_subcommand("rerank", "Re-rank one anchor's candidate pool");
    add_config(rerank, true);
    add_corpus_override(rerank);
    rerank->add_option("--anchor", anchor, "Anchor article id")->required();
    rerank->add_option("--lambda", lambda, "Relevance/diversity trade-off in [0, 1]");
    rerank->add_option("--s", list_size, "List size");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Fixed-config metric sweep");
    add_config(evaluate, true);
    add_corpus_override(evaluate);
    evaluate->add_option("--out-dir", out_dir, "Output directory (default: CSV on stdout)");

    CLI::App* experiment =
        app.add_subcommand("experiment", "Cross-validated grid search + lambda sweep");
    add_config(experiment, true);
    add_corpus_override(experiment);
    experiment->add_option("--out-dir", out_dir, "Output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (validate->parsed()) return cmd_validate(corpus_path, min_words, min_paragraphs);

        RunSettings settings = load_settings(config_path);
        if (!corpus_path.empty()) settings.corpus = corpus_path;
        if (app.count("--seed")) settings.model.seed = seed;
        if (threads < 1) threads = 1;

        if (enrich->parsed()) return cmd_enrich(settings, out_path, threads);
        if (matrix->parsed()) return cmd_matrix(settings, out_dir, threads);
        if (rerank->parsed()) return cmd_rerank(settings, anchor, lambda, list_size, threads);
        if (evaluate->parsed()) return cmd_evaluate(settings, out_dir, threads);
        if (experiment->parsed()) {
            if (!out_dir.empty()) settings.output_dir = out_dir;
            return cmd_experiment(settings, threads);
        }
    } catch (const viewdiv::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const viewdiv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 3; // unreachable: a subcommand is required
}
