#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/metrics.hpp"

using namespace viewdiv;

namespace {

ViewpointSignals signals(std::set<std::string> channels, std::vector<double> topics) {
    return {std::move(channels), {std::move(topics), false}};
}

std::vector<std::string> random_permutation(detail::Rng& rng, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
    detail::shuffle(ids, rng);
    return ids;
}

} // namespace

TEST_CASE("channel cosine distance over multi-hot sets") {
    CHECK(channel_cosine_distance({}, {}) == 0.0);
    CHECK(channel_cosine_distance({"a"}, {}) == 1.0);
    CHECK(channel_cosine_distance({"a"}, {"a"}) == Catch::Approx(0.0));
    CHECK(channel_cosine_distance({"a"}, {"b"}) == 1.0);
    CHECK(channel_cosine_distance({"a", "b"}, {"a"}) ==
          Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)));
}

TEST_CASE("ild_viewpoint: conventions and brute-force agreement") {
    std::unordered_map<std::string, ViewpointSignals> sig;
    sig["a"] = signals({"politics"}, {1.0, 0.0});
    sig["b"] = signals({"economy"}, {0.5, 0.5});
    sig["c"] = signals({"politics"}, {1.0, 0.0});

    SECTION("single item list scores 0") {
        CHECK(ild_viewpoint(std::vector<std::string>{"a"}, sig) == 0.0);
    }
    SECTION("two identical articles score 0") {
        CHECK(ild_viewpoint(std::vector<std::string>{"a", "c"}, sig) ==
              Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("disjoint channels + different topics, against the oracle") {
        double expected = oracles::ild({{"politics"}, {"economy"}},
                                       {{1.0, 0.0}, {0.5, 0.5}}, 1e-9);
        CHECK(ild_viewpoint(std::vector<std::string>{"a", "b"}, sig) ==
              Catch::Approx(expected).margin(1e-12));
        // the one-directional ln 2 term alone would give ~0.8466
        CHECK(expected > 0.5);
    }
    SECTION("missing topic distribution errors") {
        CHECK_THROWS_AS(ild_viewpoint(std::vector<std::string>{"a", "zz"}, sig), LookupError);
    }
    SECTION("permutation invariance") {
        double fwd = ild_viewpoint(std::vector<std::string>{"a", "b", "c"}, sig);
        double rev = ild_viewpoint(std::vector<std::string>{"c", "b", "a"}, sig);
        CHECK(fwd == Catch::Approx(rev).margin(1e-15));
    }
}

TEST_CASE("ild_viewpoint matches the oracle on random lists") {
    detail::Rng rng(606);
    const std::vector<std::string> channel_pool = {"p", "q", "r", "s"};
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng.next_index(5);
        std::unordered_map<std::string, ViewpointSignals> sig;
        std::vector<std::string> items;
        std::vector<std::set<std::string>> channels;
        std::vector<std::vector<double>> topics;
        for (std::size_t i = 0; i < n; ++i) {
            std::set<std::string> ch;
            std::size_t n_ch = rng.next_index(3);
            for (std::size_t c = 0; c < n_ch; ++c)
                ch.insert(channel_pool[rng.next_index(channel_pool.size())]);
            std::vector<double> t(3);
            double sum = 0;
            for (double& v : t) {
                v = rng.next_double() + 1e-6;
                sum += v;
            }
            for (double& v : t) v /= sum;
            std::string id = "i" + std::to_string(i);
            sig[id] = signals(ch, t);
            items.push_back(id);
            channels.push_back(ch);
            topics.push_back(t);
        }
        double expected = oracles::ild(channels, topics, 1e-9);
        CHECK(ild_viewpoint(items, sig) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("kendall_tau: endpoints and a hand-counted case") {
    std::vector<std::string> abcd = {"a", "b", "c", "d"};
    CHECK(kendall_tau(abcd, abcd) == 1.0);

    std::vector<std::string> reversed = {"d", "c", "b", "a"};
    CHECK(kendall_tau(abcd, reversed) == -1.0);

    std::vector<std::string> swapped = {"a", "c", "b", "d"};
    CHECK(kendall_tau(abcd, swapped) == Catch::Approx(2.0 / 3.0));
    CHECK(kendall_tau(swapped, abcd) == Catch::Approx(2.0 / 3.0)); // symmetry

    CHECK_THROWS_AS(kendall_tau(abcd, std::vector<std::string>{"a", "b"}), ValidationError);
    CHECK_THROWS_AS(kendall_tau(abcd, std::vector<std::string>{"a", "b", "c", "x"}),
                    ValidationError);
    CHECK_THROWS_AS(
        kendall_tau(std::vector<std::string>{"a", "a", "b", "c"}, abcd), ValidationError);
}

TEST_CASE("kendall_tau matches the O(n^2) oracle on random permutations") {
    detail::Rng rng(4141);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 2 + rng.next_index(12);
        detail::Rng rng_a(rng.next_u64()), rng_b(rng.next_u64());
        std::vector<std::string> a = random_permutation(rng_a, n);
        std::vector<std::string> b = a;
        detail::shuffle(b, rng_b);
        double expected = oracles::kendall_tau(a, b);
        double got = kendall_tau(a, b);
        CHECK(got == Catch::Approx(expected).margin(1e-12));
        CHECK(got >= -1.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("avg_words averages article word counts") {
    Corpus corpus;
    corpus.add(builders::article_with_counts("w600", 6, 100));  // 601 with title
    corpus.add(builders::article_with_counts("w450", 9, 50));   // 451
    corpus.add(builders::article_with_counts("w550", 10, 55));  // 551

    RankedList one;
    one.items = {"w600"};
    CHECK(avg_words(one, corpus) == 601.0);

    RankedList two;
    two.items = {"w450", "w550"};
    CHECK(avg_words(two, corpus) == 501.0);

    RankedList empty;
    CHECK_THROWS_AS(avg_words(empty, corpus), ValidationError);
}

TEST_CASE("publisher_ratio normalizes recommendation share by corpus share") {
    Corpus corpus;
    for (int i = 0; i < 4; ++i)
        corpus.add(builders::article("p1-" + std::to_string(i), {"x", "y", "z"}, "p1"));
    for (int i = 0; i < 4; ++i)
        corpus.add(builders::article("p2-" + std::to_string(i), {"x", "y", "z"}, "p2"));

    auto list_of = [](std::vector<std::string> items) {
        RankedList l;
        l.items = std::move(items);
        return l;
    };

    SECTION("proportional recommendations give ratio 1 for both") {
        std::vector<RankedList> lists = {list_of({"p1-0", "p2-0"}),
                                         list_of({"p1-1", "p2-1"})};
        PublisherStats stats = publisher_ratio(lists, corpus);
        CHECK(stats.ratios.at("p1") == Catch::Approx(1.0));
        CHECK(stats.ratios.at("p2") == Catch::Approx(1.0));
        CHECK(stats.mean_distinct == 2.0);
    }
    SECTION("never-recommended publisher maps to 0") {
        std::vector<RankedList> lists = {list_of({"p1-0", "p1-1"})};
        PublisherStats stats = publisher_ratio(lists, corpus);
        CHECK(stats.ratios.at("p1") == Catch::Approx(2.0));
        CHECK(stats.ratios.at("p2") == 0.0);
        CHECK(stats.mean_distinct == 1.0);
    }
    SECTION("three-publisher fixture against a hand count") {
        Corpus mixed;
        // shares: a=3/6, b=2/6, c=1/6
        for (int i = 0; i < 3; ++i)
            mixed.add(builders::article("a" + std::to_string(i), {"x"}, "a"));
        for (int i = 0; i < 2; ++i)
            mixed.add(builders::article("b" + std::to_string(i), {"x"}, "b"));
        mixed.add(builders::article("c0", {"x"}, "c"));
        // slots: a:1, b:2, c:1 of 4
        std::vector<RankedList> lists = {list_of({"a0", "b0"}), list_of({"b1", "c0"})};
        PublisherStats stats = publisher_ratio(lists, mixed);
        CHECK(stats.ratios.at("a") == Catch::Approx((1.0 / 4.0) / (3.0 / 6.0)));
        CHECK(stats.ratios.at("b") == Catch::Approx((2.0 / 4.0) / (2.0 / 6.0)));
        CHECK(stats.ratios.at("c") == Catch::Approx((1.0 / 4.0) / (1.0 / 6.0)));

        // weighted by corpus share, ratios sum to 1 when every slot is filled
        double weighted = 0;
        for (const auto& [p, ratio] : stats.ratios) {
            double share = p == "a" ? 3.0 / 6.0 : p == "b" ? 2.0 / 6.0 : 1.0 / 6.0;
            weighted += ratio * share;
        }
        CHECK(weighted == Catch::Approx(1.0));
    }
    SECTION("empty collection is an error") {
        CHECK_THROWS_AS(publisher_ratio(std::vector<RankedList>{}, corpus), ValidationError);
    }
}

TEST_CASE("metric records export with one column per publisher") {
    MetricRecord r1;
    r1.lambda = 0.0;
    r1.ild_diversity = 1.5;
    r1.mean_relevance = 0.3;
    r1.kendall_tau = -0.1;
    r1.avg_words = 500.25;
    r1.distinct_publishers = 2.5;
    r1.publisher_ratios = {{"blad", 1.25}, {"krant", 0.5}};
    MetricRecord r2 = r1;
    r2.lambda = 1.0;
    r2.publisher_ratios = {{"krant", 2.0}};

    std::ostringstream out;
    metric_records_to_csv(std::vector<MetricRecord>{r1, r2}, out);
    std::istringstream lines(out.str());
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(header ==
          "lambda,ild_diversity,mean_relevance,kendall_tau,avg_words,distinct_publishers,"
          "blad,krant");
    CHECK(row1 == "0,1.5,0.3,-0.1,500.25,2.5,1.25,0.5");
    CHECK(row2 == "1,1.5,0.3,-0.1,500.25,2.5,0,2");
}
