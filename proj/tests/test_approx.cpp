#include <gtest/gtest.h>

#include "reference.hpp"

using namespace fuzzykm;

TEST(Combinatorics, Counts) {
    EXPECT_EQ(combinatorics::binomial(5, 2), 10u);
    EXPECT_EQ(combinatorics::binomial(67, 64), 47905u);
    EXPECT_EQ(combinatorics::binomial(3, 4), 0u);
    EXPECT_EQ(combinatorics::multichoose(4, 2), 10u);
    EXPECT_EQ(combinatorics::power(3, 4), 81u);
    EXPECT_EQ(combinatorics::power(1u << 20, 4), combinatorics::kSaturated);
    EXPECT_EQ(combinatorics::binomial(200, 100), combinatorics::kSaturated);
}

TEST(SearchTuples, MatchesIndependentEnumerator) {
    ref::Generator g(41);
    for (int t = 0; t < 20; ++t) {
        const auto x = g.points(g.index(2, 8), 2, true);
        std::vector<Point> cands;
        for (int i = 0; i < 7; ++i) cands.push_back(g.point(2));
        const std::size_t k = g.index(1, 3);
        const auto multi = search_tuples(x, cands, k, 2, TupleOrder::multiset);
        const auto prod = search_tuples(x, cands, k, 2, TupleOrder::product);
        EXPECT_EQ(multi.evaluated, combinatorics::multichoose(7, k));
        EXPECT_EQ(prod.evaluated, combinatorics::power(7, k));
        const double expect = ref::best_tuple_cost(x, cands, k, 2);
        EXPECT_TRUE(relative_close(multi.cost, expect, 1e-12));
        EXPECT_TRUE(relative_close(prod.cost, expect, 1e-12));
    }
}

TEST(SearchTuples, ThreadCountDoesNotChangeResult) {
    ref::Generator g(42);
    const auto x = g.points(12, 2, true);
    std::vector<Point> cands;
    for (int i = 0; i < 30; ++i) cands.push_back(g.point(2));
    const auto one = search_tuples(x, cands, 2, 2, TupleOrder::product, kDefaultEnumerationCap, 1);
    const auto four = search_tuples(x, cands, 2, 2, TupleOrder::product, kDefaultEnumerationCap, 4);
    EXPECT_EQ(one.indices, four.indices);
    EXPECT_EQ(one.cost, four.cost);
    EXPECT_EQ(one.evaluated, four.evaluated);
}

TEST(SearchTuples, CapAndEmpty) {
    const auto x = instances::radicals();
    std::vector<Point> cands(100, Point{0.0});
    EXPECT_THROW(search_tuples(x, cands, 2, 2, TupleOrder::product, 9999), Error);
    try {
        search_tuples(x, cands, 2, 2, TupleOrder::product, 9999);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
        EXPECT_NE(std::string(e.what()).find("9999"), std::string::npos);
    }
    EXPECT_THROW(search_tuples(x, std::vector<Point>{}, 1, 2, TupleOrder::product), Error);
}

TEST(SearchTuples, MoreCandidatesNeverHurt) {
    ref::Generator g(43);
    for (int t = 0; t < 20; ++t) {
        const auto x = g.points(10, 2, false);
        std::vector<Point> cands;
        double prev = INFINITY;
        for (int i = 0; i < 12; ++i) {
            cands.push_back(g.point(2));
            const double c = search_tuples(x, cands, 2, 2, TupleOrder::product).cost;
            EXPECT_LE(c, prev);
            prev = c;
        }
    }
}

TEST(WeightedSample, SinglePoint) {
    const WeightedPointSet x = WeightedPointSet::unweighted({{4.0}});
    const auto s = weighted_sample_multiset(x, 5, 3);
    EXPECT_EQ(s, std::vector<std::size_t>(5, 0));
}

TEST(WeightedSample, FrequencyAndDeterminism) {
    const WeightedPointSet x({{0.0}, {1.0}}, {1.0, 3.0});
    const auto s = weighted_sample_multiset(x, 10000, 7);
    double second = 0;
    for (std::size_t i : s) second += i == 1;
    EXPECT_NEAR(second / 10000.0, 0.75, 0.02);
    EXPECT_EQ(weighted_sample_multiset(x, 10000, 7), s);
    EXPECT_NE(weighted_sample_multiset(x, 10000, 8), s);
}

TEST(WeightedSample, NeverDrawsZeroWeight) {
    const WeightedPointSet x({{0.0}, {1.0}, {2.0}}, {1.0, 0.0, 0.0});
    for (std::size_t i : weighted_sample_multiset(x, 1000, 1)) EXPECT_EQ(i, 0u);
}

TEST(SamplingParams, Defaults) {
    SamplingParams p;
    p.epsilon = 0.5;
    p.alpha = 0.2;
    EXPECT_EQ(p.repetitions(2), 14u);
    EXPECT_EQ(p.repetitions(1), 7u);
    EXPECT_EQ(p.multiset_size(), 40u);
    EXPECT_EQ(p.subset_size(), 4u);
    p.overrides.subset_size = 2;
    EXPECT_EQ(p.subset_size(), 2u);
    p.alpha = 0.4;
    EXPECT_EQ(p.multiset_size(), 20u);
    p.overrides.multiset_size = 1;
    EXPECT_THROW(p.validate(2), Error);
    p.alpha = 0.0;
    EXPECT_THROW(p.validate(2), Error);
}

TEST(CandidateTuples, SinglePairGivesOneTuple) {
    const WeightedPointSet x = WeightedPointSet::unweighted({{0.0}, {2.0}, {10.0}});
    SamplingParams p;
    p.seed = 5;
    p.overrides = {1, 2, 2};
    const auto set = build_candidate_tuples(x, 1, p);
    ASSERT_EQ(set.size(), 1u);
    const auto draws = weighted_sample_multiset(x, 2, 5, 0);
    EXPECT_DOUBLE_EQ(set.tuple(0)[0][0], (x.point(draws[0])[0] + x.point(draws[1])[0]) / 2.0);
}

TEST(CandidateTuples, Cardinality) {
    ref::Generator g(44);
    const auto x = g.points(10, 2, true);
    SamplingParams p;
    p.overrides = {3, 6, 2};
    const auto set = build_candidate_tuples(x, 2, p);
    EXPECT_EQ(set.candidate_means().size(), 3u * 15u);
    EXPECT_EQ(set.size(), 45u * 45u);
    const MeanSet t = set.tuple(45 * 7 + 11);
    EXPECT_EQ(t[0], set.candidate_means()[7]);
    EXPECT_EQ(t[1], set.candidate_means()[11]);
    EXPECT_THROW(build_candidate_tuples(x, 2, p, 1000), Error);
}

TEST(CandidateTuples, ContainsCloseMeansForPlantedClusters) {
    // Two well-separated unit-weight clusters; defaults for eps = 0.5, alpha = 0.4.
    ref::Generator g(45);
    const auto x = g.planted(10, 2, 2, 20.0, 1.0);
    std::vector<std::vector<std::size_t>> parts{{}, {}};
    for (std::size_t n = 0; n < x.size(); ++n) parts[n / 10].push_back(n);
    int hits = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        SamplingParams p;
        p.epsilon = 0.5;
        p.alpha = 0.4;
        p.seed = static_cast<std::uint64_t>(s);
        const auto set = build_candidate_tuples(x, 2, p, combinatorics::kSaturated);
        bool all = true;
        for (const auto& part : parts) {
            const auto st = hard_cluster_stats(x, part);
            const double bound = p.epsilon / st.weight * st.km;
            bool found = false;
            for (const auto& mu : set.candidate_means()) {
                if (ref::dist2(mu, st.mean) <= bound) {
                    found = true;
                    break;
                }
            }
            all = all && found;
        }
        hits += all;
    }
    EXPECT_GE(hits, seeds / 2);
}

TEST(Randomized, ExactPointsGiveZero) {
    const WeightedPointSet x = WeightedPointSet::unweighted({{0.0, 0.0}, {5.0, 1.0}});
    const auto res = randomized_approx(x, 2, 2, 0.5, 0.5, 3, {SamplingOverrides{3, 6, 1}});
    EXPECT_EQ(res.solution.cost(), 0.0);
}

TEST(Randomized, DeterministicAndSubstitutesParameters) {
    ref::Generator g(46);
    const auto x = g.planted(8, 2, 2, 10.0, 1.0);
    const SamplingOverrides ov{4, 8, 2};
    const auto a = randomized_approx(x, 2, 2, 0.5, 0.2, 9, ov);
    const auto b = randomized_approx(x, 2, 2, 0.5, 0.2, 9, ov);
    EXPECT_EQ(a.solution.means(), b.solution.means());
    EXPECT_EQ(a.solution.cost(), b.solution.cost());
    EXPECT_DOUBLE_EQ(a.params.epsilon, 0.5 / 32.0);
    EXPECT_DOUBLE_EQ(a.params.alpha, 0.1);
    EXPECT_EQ(a.candidate_means, 4u * 28u);
    EXPECT_EQ(a.tuples_evaluated, 112u * 112u);
    EXPECT_DOUBLE_EQ(a.duplication_factor, std::ceil(32.0 / 0.1));
    EXPECT_EQ(a.solution.memberships(), optimal_memberships(x, a.solution.means(), 2));
}

TEST(Randomized, DefaultSizesAreRejectedByTheCap) {
    ref::Generator g(47);
    const auto x = g.planted(8, 2, 2, 10.0, 1.0);
    try {
        randomized_approx(x, 2, 2, 0.5, 0.2, 0);
        FAIL() << "expected the cap to trip";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
    }
}

TEST(Randomized, ThreadsDoNotChangeResult) {
    ref::Generator g(48);
    const auto x = g.planted(8, 2, 2, 10.0, 1.0);
    const SamplingOverrides ov{4, 8, 2};
    const auto a = randomized_approx(x, 2, 2, 0.5, 0.2, 9, ov, {kDefaultEnumerationCap, 1});
    const auto b = randomized_approx(x, 2, 2, 0.5, 0.2, 9, ov, {kDefaultEnumerationCap, 3});
    EXPECT_EQ(a.solution.means(), b.solution.means());
    EXPECT_EQ(a.solution.cost(), b.solution.cost());
}

TEST(Duplication, ScalesCostsAndKeepsArgmin) {
    ref::Generator g(49);
    for (int t = 0; t < 10; ++t) {
        const auto x = g.points(6, 2, true);
        const std::size_t c = g.index(2, 5);
        const auto y = x.duplicated(c);
        std::vector<Point> cands;
        for (int i = 0; i < 8; ++i) cands.push_back(g.point(2));
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const MeanSet mu({cands[i], cands[(i + 3) % cands.size()]});
            EXPECT_TRUE(relative_close(induced_cost_from_means(y, mu, 2),
                                       static_cast<double>(c) * induced_cost_from_means(x, mu, 2),
                                       1e-12));
        }
        const auto bx = search_tuples(x, cands, 2, 2, TupleOrder::product);
        const auto by = search_tuples(y, cands, 2, 2, TupleOrder::product);
        EXPECT_EQ(bx.indices, by.indices);
    }
}

TEST(DuplicationFactor, Formulas) {
    EXPECT_DOUBLE_EQ(randomized_duplication_factor(2, 0.5, 0.2), 320.0);
    const WeightedPointSet x({{0.0}, {1.0}}, {1.0, 2.0});
    // 2 * 16^3 * 2^2 * 2^5 * 2 / (1 * 0.5^3)
    EXPECT_DOUBLE_EQ(ptas_duplication_factor(x, 2, 2, 0.5), 2.0 * 4096 * 4 * 32 * 2 / 0.125);
    const WeightedPointSet z({{0.0}, {1.0}}, {0.0, 2.0});
    EXPECT_TRUE(std::isinf(ptas_duplication_factor(z, 2, 2, 0.5)));
}

TEST(Ptas, SizeOneIsBestInputPoint) {
    const WeightedPointSet x({{0.0}, {1.0}, {5.0}}, {1.0, 1.0, 3.0});
    const auto res = deterministic_ptas(x, 1, 2, 0.5, 1);
    EXPECT_EQ(res.multisets_enumerated, 3u);
    double best = INFINITY;
    for (const auto& p : x.points()) best = std::min(best, kmeans_cost(x, MeanSet({p})));
    EXPECT_DOUBLE_EQ(res.solution.cost(), best);
    EXPECT_EQ(res.solution.means()[0], (Point{5.0}));
}

TEST(Ptas, PairMeansOnSixPoints) {
    const WeightedPointSet x = WeightedPointSet::unweighted({{0.0}, {1.0}, {2.0}, {9.0}, {10.0}, {11.0}});
    const auto res = deterministic_ptas(x, 2, 2, 0.5, 2);
    EXPECT_EQ(res.multisets_enumerated, 21u);
    const double brute = ref::best_tuple_cost(x, ref::multiset_means(x, 2), 2, 2);
    EXPECT_TRUE(relative_close(res.solution.cost(), brute, 1e-12));
    EXPECT_EQ(res.multiset_size, 2u);
}

TEST(Ptas, DefaultSizeAndCap) {
    const auto x = instances::radicals();
    try {
        deterministic_ptas(x, 2, 2, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
        EXPECT_NE(std::string(e.what()).find("s=128"), std::string::npos);
    }
}
