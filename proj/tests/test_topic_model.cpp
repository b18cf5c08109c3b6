#include <catch2/catch_amalgamated.hpp>

#include "viewdiv/detail/util.hpp"
#include "viewdiv/topic_model.hpp"

using namespace viewdiv;

namespace {

// Two groups with disjoint vocabularies; the standard separation fixture.
std::vector<std::vector<std::string>> disjoint_docs() {
    std::vector<std::vector<std::string>> docs;
    const std::vector<std::string> sports = {"goal", "match", "league", "striker", "stadium"};
    const std::vector<std::string> finance = {"bond", "market", "yield", "broker", "equity"};
    detail::Rng rng(99);
    for (int d = 0; d < 8; ++d) {
        const auto& vocab = d < 4 ? sports : finance;
        std::vector<std::string> doc;
        for (int w = 0; w < 40; ++w) doc.push_back(vocab[rng.next_index(vocab.size())]);
        docs.push_back(doc);
    }
    return docs;
}

} // namespace

TEST_CASE("training recovers planted disjoint-vocabulary topics") {
    auto docs = disjoint_docs();
    TopicModel model = train_topic_model(docs, 2, 0.5, 0.1, 200, 7);

    REQUIRE(model.K == 2);
    REQUIRE(model.vocab_size() == 10);
    for (std::size_t k = 0; k < model.K; ++k) {
        double sum = 0;
        for (double w : model.topic_row(k)) sum += w;
        CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }

    // each group's docs load > 0.8 of their mass on one distinct topic
    std::uint64_t seed = 7;
    auto infer = [&](const std::vector<std::string>& doc) {
        return infer_topics(model, doc, 50, seed);
    };
    TopicDistribution sports_dist = infer(docs[0]);
    TopicDistribution finance_dist = infer(docs[7]);
    std::size_t sports_top =
        sports_dist.probs[0] > sports_dist.probs[1] ? 0 : 1;
    std::size_t finance_top =
        finance_dist.probs[0] > finance_dist.probs[1] ? 0 : 1;
    CHECK(sports_top != finance_top);
    CHECK(sports_dist.probs[sports_top] > 0.8);
    CHECK(finance_dist.probs[finance_top] > 0.8);
}

TEST_CASE("identical docs get identical topic distributions") {
    std::vector<std::vector<std::string>> docs(4, {"alpha", "beta", "gamma", "alpha"});
    TopicModel model = train_topic_model(docs, 2, 0.5, 0.1, 50, 3);
    TopicDistribution a = infer_topics(model, docs[0], 30, 11);
    TopicDistribution b = infer_topics(model, docs[1], 30, 11);
    CHECK(a.probs == b.probs);
}

TEST_CASE("training is bit-identical under a fixed seed") {
    auto docs = disjoint_docs();
    TopicModel m1 = train_topic_model(docs, 3, 0.4, 0.05, 80, 123);
    TopicModel m2 = train_topic_model(docs, 3, 0.4, 0.05, 80, 123);
    CHECK(m1.topic_word == m2.topic_word);
    CHECK(m1.vocabulary == m2.vocabulary);

    TopicModel m3 = train_topic_model(docs, 3, 0.4, 0.05, 80, 124);
    CHECK(m1.topic_word != m3.topic_word);
}

TEST_CASE("training rejects bad inputs") {
    CHECK_THROWS_AS(train_topic_model({}, 2, 0.5, 0.1, 10, 1), ValidationError);
    CHECK_THROWS_AS(train_topic_model({{"a"}, {}}, 2, 0.5, 0.1, 10, 1), ValidationError);
    CHECK_THROWS_AS(train_topic_model({{"a"}}, 1, 0.5, 0.1, 10, 1), ConfigError);
    CHECK_THROWS_AS(train_topic_model({{"a"}}, 2, 0.5, 0.1, 0, 1), ConfigError);
}

TEST_CASE("inference: empty and OOV input yield flagged uniform") {
    auto docs = disjoint_docs();
    TopicModel model = train_topic_model(docs, 2, 0.5, 0.1, 60, 5);

    TopicDistribution empty = infer_topics(model, {}, 30, 1);
    CHECK(empty.oov_fallback);
    CHECK(empty.probs == std::vector<double>{0.5, 0.5});

    TopicDistribution oov = infer_topics(model, {"keinwort", "unseen"}, 30, 1);
    CHECK(oov.oov_fallback);
    CHECK(oov.probs == std::vector<double>{0.5, 0.5});

    TopicDistribution mixed = infer_topics(model, {"goal", "unseen"}, 30, 1);
    CHECK_FALSE(mixed.oov_fallback);
    CHECK(mixed.sum() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("inference picks the planted topic and is deterministic") {
    auto docs = disjoint_docs();
    TopicModel model = train_topic_model(docs, 2, 0.5, 0.1, 200, 7);

    // which topic owns the sports vocabulary?
    const std::size_t* goal = model.find_token("goal");
    REQUIRE(goal != nullptr);
    std::size_t sports_topic =
        model.topic_word[0 * model.vocab_size() + *goal] >
                model.topic_word[1 * model.vocab_size() + *goal]
            ? 0
            : 1;

    TopicDistribution d1 = infer_topics(model, {"goal", "match", "stadium", "goal"}, 50, 21);
    TopicDistribution d2 = infer_topics(model, {"goal", "match", "stadium", "goal"}, 50, 21);
    CHECK(d1.probs == d2.probs);

    std::size_t argmax = 0;
    for (std::size_t k = 1; k < d1.k(); ++k)
        if (d1.probs[k] > d1.probs[argmax]) argmax = k;
    CHECK(argmax == sports_topic);
}
