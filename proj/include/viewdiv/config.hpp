#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewdiv/distances.hpp"
#include "viewdiv/errors.hpp"

namespace viewdiv {

// Every tunable symbol of the model in one bag: the four searched
// variables (aspect weights, taxonomy level scheme, intro/conclusion
// paragraph counts), the re-ranking trade-off, the evaluation-protocol
// sizes and all topic-model knobs. Grid search varies the first four
// and leaves the rest as configured.
struct ModelConfig {
    AspectWeights aspect_weights;
    LevelWeights level_weights;
    int x = 2; // introductory paragraphs
    int y = 1; // concluding paragraphs
    double lambda = 0.0;

    int folds = 10;    // cross-validation k
    int list_size = 3; // recommendation-list size s
    std::uint64_t seed = 42;

    std::size_t topics = 50; // LDA topic count; desk-scale default
    double alpha = 0.5;
    double beta = 0.1;
    std::size_t train_iterations = 200;
    std::size_t inference_sweeps = 50;
    double kl_eps = kDefaultKlEps;
    MoralAggregate moral_aggregate = MoralAggregate::mean;

    void validate() const {
        aspect_weights.validate();
        if (x < 1 || y < 1) throw ConfigError("config: x and y must be >= 1");
        if (lambda < 0 || lambda > 1) throw ConfigError("config: lambda must be in [0, 1]");
        if (folds < 2) throw ConfigError("config: folds must be >= 2");
        if (list_size < 1) throw ConfigError("config: list size must be >= 1");
        if (topics < 2) throw ConfigError("config: topic count must be >= 2");
        if (train_iterations < 1 || inference_sweeps < 1)
            throw ConfigError("config: iterations and sweeps must be >= 1");
        if (kl_eps <= 0) throw ConfigError("config: kl_eps must be positive");
    }

    // Stricter domain used by the experiment protocol: every value must
    // come from the documented variable table. With `searched_fields_fixed`
    // false (grid-search mode), the weights/x/y on the template are
    // placeholders the search overrides and stay unchecked.
    void validate_experiment_domain(bool searched_fields_fixed = true) const {
        validate();
        if (searched_fields_fixed) {
            auto from_table = [](double w) {
                for (double v : {0.1, 0.2, 0.3, 0.4})
                    if (std::fabs(w - v) < 1e-9) return true;
                return false;
            };
            for (double w : aspect_weights.as_array())
                if (!from_table(w))
                    throw ConfigError(
                        "config: aspect weights must come from {0.1, 0.2, 0.3, 0.4}");
            if (x > 2 || y > 2) throw ConfigError("config: x and y must be 1 or 2");
        }
        if (folds != 5 && folds != 10 && folds != 20)
            throw ConfigError("config: folds must be one of {5, 10, 20}");
        if (list_size != 3 && list_size != 6 && list_size != 9)
            throw ConfigError("config: list size must be one of {3, 6, 9}");
    }
};

inline nlohmann::json model_config_to_json(const ModelConfig& c) {
    auto w = c.aspect_weights.as_array();
    return {{"aspect_weights", std::vector<double>(w.begin(), w.end())},
            {"level_scheme", to_string(c.level_weights.scheme)},
            {"x", c.x},
            {"y", c.y},
            {"lambda", c.lambda},
            {"folds", c.folds},
            {"list_size", c.list_size},
            {"seed", c.seed},
            {"topics", c.topics},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"train_iterations", c.train_iterations},
            {"inference_sweeps", c.inference_sweeps},
            {"kl_eps", c.kl_eps},
            {"moral_aggregate", to_string(c.moral_aggregate)}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    try {
        if (j.contains("aspect_weights")) {
            auto v = j.at("aspect_weights").get<std::vector<double>>();
            if (v.size() != 4)
                throw ConfigError("config: aspect_weights must have 4 entries");
            c.aspect_weights = AspectWeights::from_array({v[0], v[1], v[2], v[3]});
        }
        if (j.contains("level_scheme"))
            c.level_weights.scheme = level_scheme_from_string(j.at("level_scheme"));
        c.x = j.value("x", c.x);
        c.y = j.value("y", c.y);
        c.lambda = j.value("lambda", c.lambda);
        c.folds = j.value("folds", c.folds);
        c.list_size = j.value("list_size", c.list_size);
        c.seed = j.value("seed", c.seed);
        c.topics = j.value("topics", c.topics);
        c.alpha = j.value("alpha", c.alpha);
        c.beta = j.value("beta", c.beta);
        c.train_iterations = j.value("train_iterations", c.train_iterations);
        c.inference_sweeps = j.value("inference_sweeps", c.inference_sweeps);
        c.kl_eps = j.value("kl_eps", c.kl_eps);
        if (j.contains("moral_aggregate"))
            c.moral_aggregate = moral_aggregate_from_string(j.at("moral_aggregate"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model config: ") + e.what());
    }
    c.validate();
    return c;
}

// The full grid of searched variables: every 4-tuple of aspect weights
// from {0.1, 0.2, 0.3, 0.4} summing to 1 (44 of them), crossed with the
// level scheme and x, y in {1, 2}. Enumeration order is fixed (weights
// lexicographic, equal before ascending, x then y ascending); grid
// search resolves ties toward the earlier entry.
inline std::vector<ModelConfig> table_grid(const ModelConfig& base) {
    std::vector<ModelConfig> grid;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            for (int c = 1; c <= 4; ++c) {
                int d = 10 - a - b - c;
                if (d < 1 || d > 4) continue;
                for (LevelScheme scheme : {LevelScheme::equal, LevelScheme::ascending})
                    for (int x = 1; x <= 2; ++x)
                        for (int y = 1; y <= 2; ++y) {
                            ModelConfig cfg = base;
                            cfg.aspect_weights = AspectWeights::from_array(
                                {a / 10.0, b / 10.0, c / 10.0, d / 10.0});
                            cfg.level_weights.scheme = scheme;
                            cfg.x = x;
                            cfg.y = y;
                            cfg.lambda = 0.0; // search objective is evaluated here
                            grid.push_back(cfg);
                        }
            }
    return grid;
}

inline std::vector<double> default_lambda_sweep() {
    std::vector<double> sweep;
    for (int i = 0; i <= 10; ++i) sweep.push_back(static_cast<double>(i) / 10.0);
    return sweep;
}

inline void validate_lambda_sweep(const std::vector<double>& sweep) {
    if (sweep.empty()) throw ConfigError("lambda sweep is empty");
    for (double l : sweep) {
        if (l < 0 || l > 1) throw ConfigError("lambda sweep value outside [0, 1]");
        if (std::fabs(l * 10.0 - std::round(l * 10.0)) > 1e-9)
            throw ConfigError("lambda sweep values must be multiples of 0.1");
    }
}

} // namespace viewdiv
