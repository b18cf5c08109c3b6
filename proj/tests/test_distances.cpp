#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/oracles.hpp"
#include "viewdiv/detail/util.hpp"
#include "viewdiv/distances.hpp"

using namespace viewdiv;

namespace {

TopicDistribution dist(std::vector<double> p) { return {std::move(p), false}; }

TopicDistribution random_simplex(detail::Rng& rng, std::size_t k) {
    std::vector<double> p(k);
    double sum = 0;
    for (double& v : p) {
        v = -std::log(1.0 - rng.next_double());
        sum += v;
    }
    for (double& v : p) v /= sum;
    return dist(std::move(p));
}

CategoryPath random_path(detail::Rng& rng) {
    static const std::vector<std::string> labels = {"a", "b", "c", "d"};
    std::size_t depth = 1 + rng.next_index(kTaxonomyDepth);
    std::vector<std::string> levels;
    for (std::size_t l = 0; l < depth; ++l) levels.push_back(labels[rng.next_index(4)]);
    return CategoryPath(levels);
}

std::vector<CategoryPath> random_path_set(detail::Rng& rng, std::size_t max_size) {
    std::vector<CategoryPath> out;
    std::size_t n = rng.next_index(max_size + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_path(rng));
    return out;
}

EnrichedArticle enriched_with(std::vector<ParagraphAnnotation> body,
                              std::vector<CategoryPath> suggestions,
                              std::vector<double> topics = {0.5, 0.5}) {
    EnrichedArticle e;
    e.id = "e";
    e.topic_dist = dist(std::move(topics));
    e.body_annotations = std::move(body);
    e.suggestion_categories = std::move(suggestions);
    return e;
}

} // namespace

TEST_CASE("kl_divergence: identity, closed form, non-negativity") {
    TopicDistribution p = dist({0.2, 0.3, 0.5});
    CHECK(kl_divergence(p, p) == 0.0);

    // KL([1,0], [0.5,0.5]) = ln 2 up to eps perturbation
    CHECK(kl_divergence(dist({1.0, 0.0}), dist({0.5, 0.5})) ==
          Catch::Approx(std::log(2.0)).margin(1e-6));

    CHECK_THROWS_AS(kl_divergence(dist({1.0}), dist({0.5, 0.5})), ValidationError);
    CHECK_THROWS_AS(kl_divergence(p, p, 0.0), ConfigError);

    detail::Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        TopicDistribution a = random_simplex(rng, 2 + rng.next_index(6));
        TopicDistribution b = random_simplex(rng, a.k());
        CHECK(kl_divergence(a, b) >= 0.0);
    }
}

TEST_CASE("kl_divergence matches the brute-force oracle") {
    detail::Rng rng(55);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t k = 2 + rng.next_index(8);
        TopicDistribution a = random_simplex(rng, k);
        TopicDistribution b = random_simplex(rng, k);
        double expected = oracles::kl_divergence(a.probs, b.probs, 1e-9);
        CHECK(kl_divergence(a, b) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("weighted_jaccard_distance: worked examples") {
    LevelWeights equal{LevelScheme::equal};

    SECTION("identical non-empty sets -> 0") {
        std::vector<CategoryPath> s = {CategoryPath{"x", "a"}, CategoryPath{"y"}};
        CHECK(weighted_jaccard_distance(s, s, equal) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("partial overlap at level 2") {
        std::vector<CategoryPath> a = {CategoryPath{"x", "a"}, CategoryPath{"x", "b"}};
        std::vector<CategoryPath> b = {CategoryPath{"x", "b"}, CategoryPath{"x", "c"}};
        // levels: 1 -> J=1, 2 -> J=1/3, 3..5 -> both empty, J=1
        CHECK(weighted_jaccard_distance(a, b, equal) == Catch::Approx(2.0 / 15.0));
    }
    SECTION("one side empty") {
        std::vector<CategoryPath> a = {};
        std::vector<CategoryPath> b = {CategoryPath{"x"}};
        CHECK(weighted_jaccard_distance(a, b, equal) == Catch::Approx(0.2));
    }
    SECTION("ascending weights are l/15") {
        LevelWeights asc{LevelScheme::ascending};
        auto w = asc.weights();
        double sum = 0;
        for (std::size_t l = 0; l < w.size(); ++l) {
            CHECK(w[l] == Catch::Approx((l + 1) / 15.0));
            if (l > 0) CHECK(w[l] > w[l - 1]);
            sum += w[l];
        }
        CHECK(sum == Catch::Approx(1.0));
    }
}

TEST_CASE("weighted_jaccard_distance matches the set-based oracle") {
    detail::Rng rng(77);
    for (LevelScheme scheme : {LevelScheme::equal, LevelScheme::ascending}) {
        LevelWeights lw{scheme};
        auto warr = lw.weights();
        std::vector<double> wvec(warr.begin(), warr.end());
        for (int trial = 0; trial < 1000; ++trial) {
            auto a = random_path_set(rng, 5);
            auto b = random_path_set(rng, 5);
            std::vector<std::vector<std::string>> oa, ob;
            for (const auto& p : a) oa.push_back(p.levels);
            for (const auto& p : b) ob.push_back(p.levels);
            double expected = oracles::weighted_jaccard(oa, ob, wvec);
            double got = weighted_jaccard_distance(a, b, lw);
            CHECK(got == Catch::Approx(expected).margin(1e-12));
            CHECK(got >= 0.0);
            CHECK(got <= 1.0);
            // symmetry
            CHECK(weighted_jaccard_distance(b, a, lw) == Catch::Approx(got).margin(1e-15));
        }
    }
}

TEST_CASE("moral_divergence: products of category similarity and sentiment gap") {
    LevelWeights equal{LevelScheme::equal};
    CategoryPath deep{"x", "y", "z", "v", "w"};

    SECTION("identical articles -> 0") {
        EnrichedArticle a = enriched_with({{deep, 0.4}}, {});
        CHECK(moral_divergence(a, a, equal) == 0.0);
    }
    SECTION("same category, opposite sentiment -> full gap") {
        EnrichedArticle a = enriched_with({{deep, 0.5}}, {});
        EnrichedArticle b = enriched_with({{deep, -0.5}}, {});
        CHECK(moral_divergence(a, b, equal) == Catch::Approx(1.0));
    }
    SECTION("categories disjoint at every level -> 0 regardless of sentiment") {
        EnrichedArticle a = enriched_with({{CategoryPath{"p", "q", "r", "s", "t"}, 1.0}}, {});
        EnrichedArticle b = enriched_with({{CategoryPath{"u", "v", "w", "x", "y"}, -1.0}}, {});
        CHECK(moral_divergence(a, b, equal) == 0.0);
    }
    SECTION("mean over all cross pairs; max offered as alternative") {
        EnrichedArticle a = enriched_with({{deep, 1.0}, {deep, 0.0}}, {});
        EnrichedArticle b = enriched_with({{deep, -1.0}}, {});
        CHECK(moral_divergence(a, b, equal) == Catch::Approx((2.0 + 1.0) / 2.0));
        CHECK(moral_divergence(a, b, equal, MoralAggregate::max) == Catch::Approx(2.0));
    }
    SECTION("empty body annotations error") {
        EnrichedArticle a = enriched_with({}, {});
        EnrichedArticle b = enriched_with({{deep, 0.0}}, {});
        CHECK_THROWS_AS(moral_divergence(a, b, equal), ValidationError);
    }
}

TEST_CASE("treatment_distance: empty-set conventions") {
    LevelWeights equal{LevelScheme::equal};
    std::vector<CategoryPath> plan = {CategoryPath{"x", "y"}};

    EnrichedArticle none1 = enriched_with({{CategoryPath{"x"}, 0.0}}, {});
    EnrichedArticle none2 = enriched_with({{CategoryPath{"x"}, 0.0}}, {});
    EnrichedArticle some = enriched_with({{CategoryPath{"x"}, 0.0}}, plan);
    EnrichedArticle same = enriched_with({{CategoryPath{"x"}, 0.0}}, plan);

    CHECK(treatment_distance(none1, none2, equal) == 0.0);
    CHECK(treatment_distance(some, same, equal) == Catch::Approx(0.0).margin(1e-15));
    CHECK(treatment_distance(some, none1, equal) == 1.0);
    CHECK(treatment_distance(none1, some, equal) == 1.0);
}

TEST_CASE("aspect_matrices: shape, diagonal, symmetry") {
    detail::Rng rng(31);
    std::vector<EnrichedArticle> articles;
    for (int i = 0; i < 5; ++i) {
        EnrichedArticle e = enriched_with(
            {{random_path(rng), rng.next_double() * 2 - 1},
             {random_path(rng), rng.next_double() * 2 - 1}},
            random_path_set(rng, 3), random_simplex(rng, 4).probs);
        e.id = "a" + std::to_string(i);
        articles.push_back(e);
    }

    AspectMatrices m = aspect_matrices(articles, LevelWeights{LevelScheme::equal});
    for (const PairMatrix* pm : {&m.pd, &m.ca, &m.me, &m.tr}) {
        REQUIRE(pm->size() == 5);
        CHECK(pm->all_finite());
        for (std::size_t i = 0; i < 5; ++i) CHECK(pm->at(i, i) == 0.0);
    }
    // CA and TR are symmetric; PD is asymmetric in general
    bool pd_asymmetric = false;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(m.ca.at(i, j) == m.ca.at(j, i));
            CHECK(m.tr.at(i, j) == m.tr.at(j, i));
            if (m.pd.at(i, j) != m.pd.at(j, i)) pd_asymmetric = true;
        }
    CHECK(pd_asymmetric);

    SECTION("identical enriched articles give all-zero matrices") {
        // moral divergence runs over all body-paragraph cross pairs, so
        // the identity only zeroes out when the sentiment is uniform
        EnrichedArticle flat = articles[0];
        for (auto& ann : flat.body_annotations) ann.sentiment = 0.3;
        std::vector<EnrichedArticle> twins = {flat, flat};
        twins[1].id = "twin";
        AspectMatrices z = aspect_matrices(twins, LevelWeights{LevelScheme::equal});
        for (const PairMatrix* pm : {&z.pd, &z.ca, &z.me, &z.tr})
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    CHECK(pm->at(i, j) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("self-divergence of a mixed-sentiment body is positive off-diagonal") {
        EnrichedArticle mixed = articles[0];
        REQUIRE(mixed.body_annotations.size() == 2);
        mixed.body_annotations[0].sentiment = 0.8;
        mixed.body_annotations[1].sentiment = -0.8;
        mixed.body_annotations[1].category = mixed.body_annotations[0].category;
        std::vector<EnrichedArticle> twins = {mixed, mixed};
        twins[1].id = "twin";
        AspectMatrices z = aspect_matrices(twins, LevelWeights{LevelScheme::equal});
        CHECK(z.me.at(0, 1) > 0.0);
        CHECK(z.me.at(0, 0) == 0.0); // diagonals are forced to zero
    }
}

TEST_CASE("normalize_minmax rescales off-diagonal entries") {
    PairMatrix m({"a", "b", "c"}, "test");
    m.at(0, 1) = 1;
    m.at(0, 2) = 3;
    m.at(1, 0) = 5;
    m.at(1, 2) = 3;
    m.at(2, 0) = 1;
    m.at(2, 1) = 5;

    PairMatrix n = normalize_minmax(m);
    CHECK(n.at(0, 1) == 0.0);
    CHECK(n.at(0, 2) == 0.5);
    CHECK(n.at(1, 0) == 1.0);
    CHECK(n.at(2, 1) == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(n.at(i, i) == 0.0);

    SECTION("constant off-diagonal matrix normalizes to zeros") {
        PairMatrix c({"a", "b"}, "test", 7.0);
        c.at(0, 0) = c.at(1, 1) = 0.0;
        PairMatrix z = normalize_minmax(c);
        CHECK(z.at(0, 1) == 0.0);
        CHECK(z.at(1, 0) == 0.0);
    }
    SECTION("a [0,1] matrix spanning the range is a fixed point") {
        PairMatrix f({"a", "b", "c"}, "test");
        f.at(0, 1) = 0.0;
        f.at(1, 0) = 1.0;
        f.at(0, 2) = 0.25;
        f.at(2, 0) = 0.75;
        f.at(1, 2) = 0.5;
        f.at(2, 1) = 1.0;
        PairMatrix same = normalize_minmax(f);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(same.at(i, j) == f.at(i, j));
    }
}

TEST_CASE("combine: projection, convexity, dot-product oracle") {
    auto fill = [](PairMatrix& m, detail::Rng& rng) {
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j)
                if (i != j) m.at(i, j) = rng.next_double();
    };
    detail::Rng rng(17);
    std::vector<std::string> ids = {"a", "b", "c", "d"};
    PairMatrix pd(ids, "pd"), ca(ids, "ca"), me(ids, "me"), tr(ids, "tr");
    fill(pd, rng);
    fill(ca, rng);
    fill(me, rng);
    fill(tr, rng);

    SECTION("weights (1,0,0,0) project onto pd") {
        PairMatrix out = combine(pd, ca, me, tr, AspectWeights{1, 0, 0, 0});
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(out.at(i, j) == pd.at(i, j));
    }
    SECTION("equal matrices pass through under any valid weights") {
        PairMatrix out = combine(pd, pd, pd, pd, AspectWeights{0.25, 0.25, 0.25, 0.25});
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(out.at(i, j) == Catch::Approx(pd.at(i, j)).margin(1e-15));
    }
    SECTION("per-cell weighted sum against a scalar oracle") {
        AspectWeights w{0.2, 0.4, 0.1, 0.3}; // a published configuration
        PairMatrix out = combine(pd, ca, me, tr, w);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                if (i == j) continue;
                double expected = 0.2 * pd.at(i, j) + 0.4 * ca.at(i, j) +
                                  0.1 * me.at(i, j) + 0.3 * tr.at(i, j);
                CHECK(out.at(i, j) == Catch::Approx(expected).margin(1e-15));
                CHECK(out.at(i, j) >= 0.0);
                CHECK(out.at(i, j) <= 1.0);
            }
    }
    SECTION("id-order mismatch is an error") {
        PairMatrix other({"b", "a", "c", "d"}, "ca");
        CHECK_THROWS_AS(combine(pd, other, me, tr, AspectWeights{0.25, 0.25, 0.25, 0.25}),
                        ValidationError);
    }
    SECTION("invalid weights rejected") {
        CHECK_THROWS_AS(combine(pd, ca, me, tr, AspectWeights{0.5, 0.5, 0.5, 0.5}),
                        ConfigError);
    }
}

TEST_CASE("pair matrix CSV export carries ids and %.12g values") {
    PairMatrix m({"a1", "a2"}, "relevance");
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;
    m.at(0, 1) = m.at(1, 0) = 1.0 / 3.0;

    std::ostringstream out;
    m.to_csv(out);
    CHECK(out.str() == "id,a1,a2\na1,1,0.333333333333\na2,0.333333333333,1\n");

    SECTION("lookups by unknown id name the pair") {
        CHECK_THROWS_WITH(m.between("a1", "zz"), Catch::Matchers::ContainsSubstring("zz"));
    }
}

TEST_CASE("element distances match brute force on random articles") {
    detail::Rng rng(4242);
    LevelWeights lw{LevelScheme::ascending};
    auto warr = lw.weights();
    std::vector<double> wvec(warr.begin(), warr.end());

    for (int trial = 0; trial < 300; ++trial) {
        EnrichedArticle a = enriched_with(
            {{random_path(rng), rng.next_double() * 2 - 1}}, random_path_set(rng, 4));
        EnrichedArticle b = enriched_with(
            {{random_path(rng), rng.next_double() * 2 - 1}}, random_path_set(rng, 4));

        // moral: one body pair -> sim * |ds|
        double sim = 1.0 - oracles::weighted_jaccard({a.body_annotations[0].category.levels},
                                                     {b.body_annotations[0].category.levels},
                                                     wvec);
        double expected_me =
            sim * std::fabs(a.body_annotations[0].sentiment - b.body_annotations[0].sentiment);
        CHECK(moral_divergence(a, b, lw) == Catch::Approx(expected_me).margin(1e-12));

        // treatment with explicit conventions
        double expected_tr;
        if (a.suggestion_categories.empty() && b.suggestion_categories.empty())
            expected_tr = 0.0;
        else if (a.suggestion_categories.empty() || b.suggestion_categories.empty())
            expected_tr = 1.0;
        else {
            std::vector<std::vector<std::string>> oa, ob;
            for (const auto& p : a.suggestion_categories) oa.push_back(p.levels);
            for (const auto& p : b.suggestion_categories) ob.push_back(p.levels);
            expected_tr = oracles::weighted_jaccard(oa, ob, wvec);
        }
        CHECK(treatment_distance(a, b, lw) == Catch::Approx(expected_tr).margin(1e-12));
    }
}
