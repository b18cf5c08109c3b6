#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "viewdiv/corpus.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/distances.hpp"
#include "viewdiv/sentiment.hpp"
#include "viewdiv/suggestions.hpp"
#include "viewdiv/taxonomy.hpp"
#include "viewdiv/text.hpp"

namespace viewdiv {

// Synthetic opinion-piece corpus with four planted viewpoint clusters,
// used by the bundled demos and the verification suite. Each cluster
// has its own vocabulary, channel, taxonomy subtree and suggestion
// targets; stances alternate inside a cluster so articles on the same
// issue disagree. A few "maverick" articles with one-off vocabularies
// and a rare publisher are mixed in; pure-diversity re-ranking tends to
// amplify exactly such articles.
struct SyntheticSpec {
    std::size_t per_cluster = 11;
    std::size_t mavericks = 4;
    std::uint64_t seed = 20200615;
    std::size_t sentences_per_paragraph = 6;
    std::size_t words_per_sentence = 11;
};

namespace synthetic {

struct ClusterDef {
    const char* prefix;
    const char* channel; // equals the taxonomy level-1 root
    const char* publisher;
    std::vector<const char*> vocabulary;
    // aspect keyword groups; each maps to one taxonomy path
    std::vector<std::vector<const char*>> aspects;
    std::vector<std::vector<const char*>> aspect_paths;
};

inline const std::vector<ClusterDef>& clusters() {
    static const std::vector<ClusterDef> defs = {
        {"en", "energy", "morgenpost",
         {"turbine", "windfarm", "grid", "solar", "reactor", "megawatt", "offshore",
          "substation", "voltage", "pylon", "biofuel", "hydrogen"},
         {{"turbine", "windfarm", "offshore"},
          {"solar", "megawatt"},
          {"reactor", "hydrogen"},
          {"grid", "voltage", "substation", "pylon"}},
         {{"energy", "renewables", "wind"},
          {"energy", "renewables", "solar"},
          {"energy", "generation", "nuclear"},
          {"energy", "infrastructure", "grid"}}},
        {"ho", "housing", "dagblad",
         {"tenant", "landlord", "rent", "mortgage", "zoning", "eviction", "apartment",
          "permit", "construction", "suburb", "density", "renovation"},
         {{"tenant", "landlord", "eviction"},
          {"rent", "mortgage"},
          {"zoning", "permit", "construction", "density"},
          {"apartment", "suburb", "renovation"}},
         {{"housing", "rental", "tenancy"},
          {"housing", "market", "prices"},
          {"housing", "planning", "zoning"},
          {"housing", "stock", "apartments"}}},
        {"tr", "transit", "koerier",
         {"tram", "bus", "cycling", "commuter", "rail", "station", "timetable", "fare",
          "platform", "congestion", "highway", "parking"},
         {{"tram", "rail", "station", "platform"},
          {"bus", "timetable", "fare"},
          {"cycling"},
          {"congestion", "highway", "parking", "commuter"}},
         {{"transit", "rail", "trams"},
          {"transit", "bus", "fares"},
          {"transit", "cycling", "lanes"},
          {"transit", "road", "congestion"}}},
        {"fa", "farming", "tribune",
         {"nitrogen", "livestock", "pasture", "manure", "harvest", "dairy", "fertilizer",
          "crop", "barn", "grazing", "silage", "tractor"},
         {{"nitrogen", "fertilizer", "manure"},
          {"livestock", "dairy", "grazing", "pasture"},
          {"harvest", "crop", "silage"},
          {"barn", "tractor"}},
         {{"farming", "emissions", "nitrogen"},
          {"farming", "livestock", "dairy"},
          {"farming", "crops", "harvest"},
          {"farming", "equipment", "machinery"}}}};
    return defs;
}

inline const std::vector<const char*>& shared_vocabulary() {
    static const std::vector<const char*> words = {
        "policy", "debate",   "minister", "council",  "citizens", "report",
        "budget", "plan",     "measure",  "proposal", "public",   "decision",
        "week",   "year",     "country",  "city",     "statement", "meeting"};
    return words;
}

inline const std::vector<std::vector<const char*>>& maverick_vocabularies() {
    static const std::vector<std::vector<const char*>> vocabs = {
        {"zeppelin", "airship", "ballast", "mooring", "helium", "gondola", "altitude",
         "drift"},
        {"glacier", "moraine", "crevasse", "icefall", "permafrost", "meltwater", "fjord",
         "serac"},
        {"orchestra", "sonata", "violin", "conductor", "rehearsal", "concerto", "podium",
         "encore"},
        {"meteor", "asteroid", "observatory", "telescope", "comet", "orbit", "eclipse",
         "nebula"}};
    return vocabs;
}

inline const char* kMaverickPublisher = "heraut";
inline const char* kCommonPublisher = "observer";

inline const std::vector<std::pair<const char*, double>>& positive_words() {
    static const std::vector<std::pair<const char*, double>> words = {
        {"beneficial", 0.8}, {"efficient", 0.7}, {"fair", 0.6},     {"promising", 0.9},
        {"affordable", 0.7}, {"sustainable", 0.8}, {"reliable", 0.7}, {"sensible", 0.6}};
    return words;
}

inline const std::vector<std::pair<const char*, double>>& negative_words() {
    static const std::vector<std::pair<const char*, double>> words = {
        {"harmful", -0.8},      {"wasteful", -0.7}, {"unfair", -0.6},     {"risky", -0.9},
        {"unaffordable", -0.7}, {"polluting", -0.8}, {"unreliable", -0.7}, {"absurd", -0.6}};
    return words;
}

inline std::string capitalize(std::string word) {
    if (!word.empty() && word[0] >= 'a' && word[0] <= 'z')
        word[0] = static_cast<char>(word[0] - 'a' + 'A');
    return word;
}

} // namespace synthetic

inline Taxonomy synthetic_taxonomy() {
    std::map<std::string, CategoryPath> keywords;
    for (const auto& cluster : synthetic::clusters())
        for (std::size_t a = 0; a < cluster.aspects.size(); ++a) {
            std::vector<std::string> path;
            for (const char* label : cluster.aspect_paths[a]) path.emplace_back(label);
            for (const char* kw : cluster.aspects[a]) keywords[kw] = CategoryPath(path);
        }
    return Taxonomy("general", std::move(keywords));
}

inline SentimentLexicon synthetic_sentiment_lexicon() {
    std::unordered_map<std::string, double> valences;
    for (const auto& [w, v] : synthetic::positive_words()) valences[w] = v;
    for (const auto& [w, v] : synthetic::negative_words()) valences[w] = v;
    return SentimentLexicon(std::move(valences));
}

inline CueLexicon synthetic_cues() {
    nlohmann::json j = {{"modal", {"should", "must", "need to", "needs to", "ought to"}},
                        {"imperative", {"let", "stop", "ban"}}};
    return CueLexicon::from_json(j);
}

inline Normalizer synthetic_normalizer() {
    Normalizer norm;
    norm.stop_words = {"the", "a",  "an",   "and",  "or",   "of", "to",   "in",  "on",
                       "for", "with", "is", "are",  "was",  "be", "this", "that", "it",
                       "as",  "at", "by",   "from", "we",   "our", "now",  "about"};
    return norm;
}

namespace synthetic {

struct WordSource {
    const std::vector<const char*>* primary;
    const std::vector<const char*>* shared;
    detail::Rng* rng;

    std::string draw(double primary_prob) const {
        const auto& pool =
            rng->next_double() < primary_prob ? *primary : *shared;
        return pool[rng->next_index(pool.size())];
    }
};

inline std::string make_sentence(const WordSource& source, std::size_t n_words,
                                 std::vector<std::string> planted) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n_words; ++i) words.push_back(source.draw(0.5));
    // overwrite random slots with the planted terms, keeping length fixed
    for (std::size_t i = 0; i < planted.size() && i < words.size(); ++i)
        words[source.rng->next_index(words.size())] = planted[i];
    std::string sentence = capitalize(words[0]);
    for (std::size_t i = 1; i < words.size(); ++i) {
        sentence += ' ';
        sentence += words[i];
    }
    sentence += '.';
    return sentence;
}

} // namespace synthetic

inline Corpus make_synthetic_corpus(const SyntheticSpec& spec = {}) {
    detail::Rng rng(detail::mix64(spec.seed ^ 0x5e3a1c9bd2f84a77ull));
    const auto& defs = synthetic::clusters();

    std::vector<Article> articles;
    int day = 1;
    auto next_date = [&day]() {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "2020-%02d-%02d", 6 + day / 28, 1 + day % 28);
        ++day;
        return std::string(buf);
    };

    for (std::size_t c = 0; c < defs.size(); ++c) {
        const auto& cluster = defs[c];
        std::vector<const char*> cluster_vocab = cluster.vocabulary;
        synthetic::WordSource source{&cluster_vocab, &synthetic::shared_vocabulary(), &rng};

        for (std::size_t i = 0; i < spec.per_cluster; ++i) {
            Article a;
            char idbuf[16];
            std::snprintf(idbuf, sizeof(idbuf), "%s-%02zu", cluster.prefix, i + 1);
            a.id = idbuf;
            a.published_at = next_date();

            const bool positive_stance = i % 2 == 0;
            const std::size_t aspect = i % cluster.aspects.size();
            const auto& stance_words =
                positive_stance ? synthetic::positive_words() : synthetic::negative_words();

            // publisher: cluster-dominant with a common publisher mixed in
            a.publisher = rng.next_double() < 0.3 ? synthetic::kCommonPublisher
                                                  : cluster.publisher;
            // one article per cluster has no channels and exercises the
            // level-1 category fallback
            if (i + 1 != spec.per_cluster) a.channels.insert(cluster.channel);

            a.title = synthetic::make_sentence(source, 7, {cluster.vocabulary[aspect]});
            a.title.pop_back(); // headlines carry no final period

            for (int p = 0; p < 2; ++p) { // intro
                std::string paragraph;
                for (std::size_t s = 0; s < spec.sentences_per_paragraph; ++s) {
                    if (!paragraph.empty()) paragraph += ' ';
                    paragraph += synthetic::make_sentence(source, spec.words_per_sentence, {});
                }
                a.paragraphs.push_back(paragraph);
            }
            for (int p = 0; p < 5; ++p) { // body
                const auto& kws = cluster.aspects[(aspect + p) % cluster.aspects.size()];
                std::string paragraph;
                for (std::size_t s = 0; s < spec.sentences_per_paragraph; ++s) {
                    std::vector<std::string> planted;
                    if (s < 3) planted.push_back(kws[s % kws.size()]);
                    if (s < 2)
                        planted.push_back(
                            stance_words[rng.next_index(stance_words.size())].first);
                    if (!paragraph.empty()) paragraph += ' ';
                    paragraph += synthetic::make_sentence(source, spec.words_per_sentence,
                                                          std::move(planted));
                }
                a.paragraphs.push_back(paragraph);
            }
            { // conclusion: one mined suggestion unless this article skips it
                std::string paragraph =
                    synthetic::make_sentence(source, spec.words_per_sentence, {});
                if (i % 5 != 4) {
                    const auto& kws = cluster.aspects[aspect];
                    paragraph += " We should ";
                    paragraph += kws[0];
                    paragraph += " reform without delay.";
                }
                paragraph += ' ';
                paragraph += synthetic::make_sentence(source, spec.words_per_sentence, {});
                a.paragraphs.push_back(paragraph);
            }
            articles.push_back(std::move(a));
        }
    }

    // mavericks: one-off vocabularies, no channels, no taxonomy hits,
    // extreme stances, rare publisher
    const auto& maverick_vocabs = synthetic::maverick_vocabularies();
    for (std::size_t m = 0; m < spec.mavericks; ++m) {
        const auto& vocab = maverick_vocabs[m % maverick_vocabs.size()];
        std::vector<const char*> primary(vocab.begin(), vocab.end());
        synthetic::WordSource source{&primary, &synthetic::shared_vocabulary(), &rng};

        Article a;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "mv-%02zu", m + 1);
        a.id = idbuf;
        a.published_at = next_date();
        a.publisher = synthetic::kMaverickPublisher;

        const bool positive_stance = m % 2 == 0;
        const auto& stance_words =
            positive_stance ? synthetic::positive_words() : synthetic::negative_words();

        a.title = synthetic::make_sentence(source, 7, {});
        a.title.pop_back();
        for (int p = 0; p < 8; ++p) {
            std::string paragraph;
            for (std::size_t s = 0; s < spec.sentences_per_paragraph; ++s) {
                std::vector<std::string> planted;
                if (p >= 2 && p < 7 && s < 2)
                    planted.push_back(
                        stance_words[rng.next_index(stance_words.size())].first);
                if (!paragraph.empty()) paragraph += ' ';
                // heavier primary mix: mavericks live in their own vocabulary
                std::vector<std::string> words;
                for (std::size_t i = 0; i < spec.words_per_sentence; ++i)
                    words.push_back(source.draw(0.75));
                for (std::size_t i = 0; i < planted.size(); ++i)
                    words[source.rng->next_index(words.size())] = planted[i];
                std::string sentence = synthetic::capitalize(words[0]);
                for (std::size_t i = 1; i < words.size(); ++i) {
                    sentence += ' ';
                    sentence += words[i];
                }
                sentence += '.';
                paragraph += sentence;
            }
            if (p == 7) {
                paragraph += " We must ";
                paragraph += primary[0];
                paragraph += " differently.";
            }
            a.paragraphs.push_back(paragraph);
        }
        articles.push_back(std::move(a));
    }

    return Corpus(std::move(articles));
}

} // namespace viewdiv
