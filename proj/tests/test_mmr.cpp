#include <catch2/catch_amalgamated.hpp>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/mmr.hpp"

using namespace viewdiv;

namespace {

struct Instance {
    std::vector<std::string> pool;
    PairMatrix rel;
    PairMatrix div;
    oracles::MmrInstance oracle;
};

// Random MMR instance over pool + anchor; relevance values are drawn
// from a small lattice so exact ties actually happen.
Instance random_instance(detail::Rng& rng, std::size_t pool_size, bool lattice_ties) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < pool_size; ++i) ids.push_back("c" + std::to_string(i));
    std::vector<std::string> all = ids;
    all.push_back("anchor");

    Instance inst{ids, PairMatrix(all, "relevance"), PairMatrix(ids, "diversity"), {}};
    inst.oracle.pool = ids;

    for (const auto& id : ids) {
        double r = lattice_ties ? rng.next_index(4) / 4.0 : rng.next_double();
        inst.rel.at(inst.rel.index_of(id), inst.rel.index_of("anchor")) = r;
        inst.oracle.rel[id] = r;
    }
    for (const auto& a : ids)
        for (const auto& b : ids) {
            if (a == b) continue;
            double d = lattice_ties ? rng.next_index(4) / 4.0 : rng.next_double();
            inst.div.at(inst.div.index_of(a), inst.div.index_of(b)) = d;
            inst.oracle.div[{a, b}] = d;
        }
    return inst;
}

} // namespace

TEST_CASE("lambda = 1 reduces to relevance ranking with lexicographic ties") {
    std::vector<std::string> all = {"b", "a", "c", "anchor"};
    PairMatrix rel(all, "relevance");
    PairMatrix div({"b", "a", "c"}, "diversity", 0.9);
    std::size_t anchor = rel.index_of("anchor");
    rel.at(rel.index_of("a"), anchor) = 0.5;
    rel.at(rel.index_of("b"), anchor) = 0.5; // tie with a -> "a" first
    rel.at(rel.index_of("c"), anchor) = 0.9;

    RankedList list = mmr_rerank("anchor", std::vector<std::string>{"b", "a", "c"}, rel, div,
                                 1.0, 3);
    CHECK(list.items == std::vector<std::string>{"c", "a", "b"});
    CHECK(list.scores == std::vector<double>{0.9, 0.5, 0.5});

    SECTION("output is invariant to diversity contents at lambda = 1") {
        PairMatrix other_div({"b", "a", "c"}, "diversity", 0.123);
        RankedList again = mmr_rerank("anchor", std::vector<std::string>{"b", "a", "c"}, rel,
                                      other_div, 1.0, 3);
        CHECK(again.items == list.items);
    }
    SECTION("baseline_rerank is the lambda = 1 alias") {
        RankedList base =
            baseline_rerank("anchor", std::vector<std::string>{"b", "a", "c"}, rel, 3);
        CHECK(base.items == list.items);
        CHECK(base.scores == list.scores);
        CHECK(base.lambda == 1.0);
    }
}

TEST_CASE("lambda = 0: first pick falls back to the relevance tie-break") {
    std::vector<std::string> all = {"a", "b", "anchor"};
    PairMatrix rel(all, "relevance");
    PairMatrix div({"a", "b"}, "diversity", 0.4);
    rel.at(rel.index_of("a"), rel.index_of("anchor")) = 0.2;
    rel.at(rel.index_of("b"), rel.index_of("anchor")) = 0.8;

    RankedList list =
        mmr_rerank("anchor", std::vector<std::string>{"a", "b"}, rel, div, 0.0, 2);
    REQUIRE(list.items.size() == 2);
    CHECK(list.items[0] == "b"); // all scores are 0 at step 1
    CHECK(list.scores[0] == 0.0);
}

TEST_CASE("4-candidate worked example equals the step-wise oracle") {
    detail::Rng rng(5);
    Instance inst = random_instance(rng, 4, false);
    RankedList list = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, 0.5, 3);
    auto expected = oracles::greedy_mmr(inst.oracle, 0.5, 3);
    CHECK(list.items == expected);
}

TEST_CASE("edge cases: empty pool, small pool, bad arguments") {
    std::vector<std::string> all = {"a", "anchor"};
    PairMatrix rel(all, "relevance");
    PairMatrix div({"a"}, "diversity");

    RankedList empty = baseline_rerank("anchor", std::vector<std::string>{}, rel, 3);
    CHECK(empty.items.empty());

    RankedList truncated =
        mmr_rerank("anchor", std::vector<std::string>{"a"}, rel, div, 0.5, 5);
    CHECK(truncated.items == std::vector<std::string>{"a"});
    CHECK(truncated.s == 5);

    CHECK_THROWS_AS(mmr_rerank("anchor", std::vector<std::string>{"a"}, rel, div, 1.5, 3),
                    ConfigError);
    CHECK_THROWS_AS(mmr_rerank("anchor", std::vector<std::string>{"a"}, rel, div, 0.5, 0),
                    ConfigError);
    CHECK_THROWS_AS(
        mmr_rerank("anchor", std::vector<std::string>{"a", "anchor"}, rel, div, 0.5, 3),
        ValidationError);
}

TEST_CASE("missing matrix entries are reported with the id pair") {
    PairMatrix rel({"a", "anchor"}, "relevance");
    PairMatrix div_empty({"nothing"}, "diversity");
    CHECK_THROWS_WITH(
        mmr_rerank("anchor", std::vector<std::string>{"a"}, rel, div_empty, 0.5, 1),
        Catch::Matchers::ContainsSubstring("'a'") &&
            Catch::Matchers::ContainsSubstring("anchor"));

    PairMatrix rel_missing({"anchor"}, "relevance");
    PairMatrix div({"a"}, "diversity");
    CHECK_THROWS_AS(mmr_rerank("anchor", std::vector<std::string>{"a"}, rel_missing, div, 0.5, 1),
                    LookupError);
}

TEST_CASE("mmr equals the exhaustive greedy oracle on random instances") {
    detail::Rng rng(2718);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::size_t pool_size = 2 + rng.next_index(7); // up to 8
        bool ties = trial % 2 == 0;
        Instance inst = random_instance(rng, pool_size, ties);
        for (double lambda : {0.0, 0.3, 0.7, 1.0}) {
            std::size_t s = 1 + rng.next_index(pool_size);
            RankedList got = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, lambda, s);
            auto expected = oracles::greedy_mmr(inst.oracle, lambda, s);
            REQUIRE(got.items == expected);
            ++checked;
        }
    }
    CHECK(checked >= 1000);
}

TEST_CASE("prefix consistency: size-s list is a prefix of the size-s' list") {
    detail::Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = random_instance(rng, 6, trial % 2 == 0);
        double lambda = rng.next_index(11) / 10.0;
        RankedList small = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, lambda, 2);
        RankedList large = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, lambda, 5);
        REQUIRE(large.items.size() >= small.items.size());
        for (std::size_t i = 0; i < small.items.size(); ++i)
            CHECK(small.items[i] == large.items[i]);
    }
}

TEST_CASE("determinism: identical inputs give identical output") {
    detail::Rng rng(31337);
    Instance inst = random_instance(rng, 8, true);
    RankedList a = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, 0.4, 5);
    RankedList b = mmr_rerank("anchor", inst.pool, inst.rel, inst.div, 0.4, 5);
    CHECK(a.items == b.items);
    CHECK(a.scores == b.scores);

    // pool order must not matter either: reverse it
    std::vector<std::string> reversed(inst.pool.rbegin(), inst.pool.rend());
    RankedList c = mmr_rerank("anchor", reversed, inst.rel, inst.div, 0.4, 5);
    CHECK(c.items == a.items);
}

TEST_CASE("ranked list serializes anchor, lambda, s and publishers") {
    Corpus corpus;
    corpus.add(builders::article("a1", {"p1", "p2", "p3"}, "krant"));
    corpus.add(builders::article("a2", {"p1", "p2", "p3"}, "blad"));

    RankedList list;
    list.anchor_id = "a1";
    list.lambda = 0.3;
    list.s = 3;
    list.items = {"a2"};
    list.scores = {0.12};

    nlohmann::json j = ranked_list_to_json(list, corpus);
    CHECK(j["anchor"] == "a1");
    CHECK(j["lambda"] == 0.3);
    CHECK(j["s"] == 3);
    REQUIRE(j["items"].size() == 1);
    CHECK(j["items"][0]["id"] == "a2");
    CHECK(j["items"][0]["publisher"] == "blad");
    CHECK(j["items"][0]["score"] == 0.12);
}
