// Regenerates the bundled synthetic fixture: corpus, annotator resource
// files and a ready-to-run experiment configuration. Output is
// deterministic, so reruns leave committed files unchanged.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "viewdiv/config.hpp"
#include "viewdiv/corpus.hpp"
#include "viewdiv/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

int main(int argc, char** argv) {
    fs::path dir = argc > 1 ? argv[1] : "data/fixtures";
    fs::create_directories(dir);

    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << (dir / name).string() << "\n";
            std::exit(1);
        }
        out << content;
    };

    viewdiv::Corpus corpus = viewdiv::make_synthetic_corpus();
    {
        std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
        viewdiv::serialize_corpus(corpus, out);
    }
    write("taxonomy.json", viewdiv::synthetic_taxonomy().to_json().dump(2) + "\n");
    write("sentiment_lexicon.json",
          viewdiv::synthetic_sentiment_lexicon().to_json().dump(2) + "\n");
    write("cues.json", viewdiv::synthetic_cues().to_json().dump(2) + "\n");
    {
        viewdiv::Normalizer norm = viewdiv::synthetic_normalizer();
        std::vector<std::string> words(norm.stop_words.begin(), norm.stop_words.end());
        std::sort(words.begin(), words.end());
        write("stopwords.json", json(words).dump(2) + "\n");
    }
    {
        viewdiv::ModelConfig model;
        model.aspect_weights = viewdiv::AspectWeights::from_array({0.2, 0.4, 0.1, 0.3});
        model.topics = 8;
        model.train_iterations = 150;
        model.inference_sweeps = 30;
        json config = {{"corpus", "corpus.jsonl"},
                       {"annotators",
                        {{"mode", "builtin"},
                         {"taxonomy", "taxonomy.json"},
                         {"sentiment_lexicon", "sentiment_lexicon.json"},
                         {"stopwords", "stopwords.json"},
                         {"cues", "cues.json"}}},
                       {"model", viewdiv::model_config_to_json(model)},
                       {"grid_search", true},
                       {"lambda_sweep", viewdiv::default_lambda_sweep()},
                       {"output_dir", "out"}};
        write("experiment_config.json", config.dump(2) + "\n");
    }

    std::cout << "wrote fixture (" << corpus.size() << " articles, hash "
              << viewdiv::corpus_hash(corpus) << ") to " << dir.string() << "\n";
    return 0;
}
