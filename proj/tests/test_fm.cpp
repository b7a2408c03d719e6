#include <gtest/gtest.h>

#include <set>

#include "reference.hpp"

using namespace fuzzykm;

TEST(FmStep, OneClusterGoesToCentroid) {
    const WeightedPointSet x({{0.0, 0.0}, {4.0, 2.0}, {1.0, 7.0}}, {1.0, 2.0, 0.5});
    const auto [mu, r] = fm_step(x, MeanSet({{100.0, -3.0}}), 2);
    const Point c = x.centroid();
    EXPECT_NEAR(mu[0][0], c[0], 1e-12);
    EXPECT_NEAR(mu[0][1], c[1], 1e-12);
    EXPECT_DOUBLE_EQ(r(1, 0), 1.0);
}

TEST(FmStep, FixedPointStaysPut) {
    const auto x = instances::radicals();
    MeanSet fixed({{-2.0}, {2.0}});
    // Iterate to machine precision; FM converges linearly here.
    for (int i = 0; i < 5000; ++i) fixed = fm_step(x, fixed, 2).first;
    const MeanSet again = fm_step(x, fixed, 2).first;
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(again[k][0], fixed[k][0], 1e-12);
}

TEST(FmStep, PoorLocalMeansShareFirstCoordinate) {
    const double a = 8.0;
    const auto x = instances::poor_local(a);
    const MeanSet next = fm_step(x, instances::poor_local_bad_init(a), 2).first;
    EXPECT_NEAR(next[0][0], next[1][0], 1e-9);
}

TEST(RunFm, RadicalsConvergesToRoot) {
    const auto x = instances::radicals();
    FmConfig cfg;
    cfg.init = ExplicitMeans{MeanSet({{-2.0}, {2.0}})};
    cfg.rel_cost_tolerance = 1e-15;
    const auto res = run_fm(x, cfg, 2, 2);
    const auto& mu = res.solution.means();
    EXPECT_NEAR(std::max(mu[0][0], mu[1][0]), 2.032093935, 1e-6);
    EXPECT_NEAR(std::min(mu[0][0], mu[1][0]), -2.032093935, 1e-6);
}

TEST(RunFm, PoorLocalBadAndGood) {
    const double a = 8.0;
    const auto x = instances::poor_local(a);
    FmConfig bad, good;
    bad.init = ExplicitMeans{instances::poor_local_bad_init(a)};
    good.init = ExplicitMeans{instances::poor_local_good_init(a)};
    const auto rb = run_fm(x, bad, 2, 2);
    const auto rg = run_fm(x, good, 2, 2);
    EXPECT_GE(rb.solution.cost(), 32.0);
    EXPECT_LT(rg.solution.cost(), 4.0);
    const double a2 = 4 * a * a;
    EXPECT_NEAR(rg.trace.records.front().cost, 4.0 * (a2 + 1.0) / (a2 + 2.0), 1e-12);
    // The symmetry trap holds at every iteration.
    for (const auto& rec : rb.trace.records) EXPECT_NEAR(rec.means[0][0], rec.means[1][0], 1e-9);
}

TEST(RunFm, TraceIsMonotone) {
    ref::Generator g(31);
    for (int t = 0; t < 100; ++t) {
        const std::size_t k = g.index(1, 4);
        const int m = static_cast<int>(g.index(2, 3));
        const auto x = g.points(g.index(k, 25), g.index(1, 3), t % 2 == 0);
        FmConfig cfg;
        cfg.init = RandomPoints{static_cast<std::uint64_t>(t)};
        const auto res = run_fm(x, cfg, m, k);
        const auto& recs = res.trace.records;
        for (std::size_t i = 1; i < recs.size(); ++i) {
            EXPECT_LE(recs[i].cost, recs[i - 1].cost * (1 + 1e-12));
        }
        EXPECT_TRUE(relative_close(res.solution.cost(),
                                   induced_cost_from_means(x, res.solution.means(), m), 1e-12));
    }
}

TEST(RunFm, ConvergedMeansAreNearlyFixed) {
    ref::Generator g(32);
    for (int t = 0; t < 50; ++t) {
        const auto x = g.points(15, 2, true);
        FmConfig cfg;
        cfg.init = RandomPoints{static_cast<std::uint64_t>(t)};
        const auto res = run_fm(x, cfg, 2, 3);
        if (res.trace.termination != FmTermination::converged) continue;
        const double before = res.trace.records.back().cost;
        const double after =
            induced_cost_from_means(x, fm_step(x, res.trace.records.back().means, 2).first, 2);
        EXPECT_LT(std::abs(before - after), 10 * cfg.rel_cost_tolerance * before);
    }
}

TEST(RunFm, MaxIterationsRespected) {
    const auto x = instances::radicals();
    FmConfig cfg;
    cfg.max_iterations = 2;
    cfg.rel_cost_tolerance = 1e-300;
    cfg.init = FromPointIndices{{0, 1}};
    const auto res = run_fm(x, cfg, 2, 2);
    EXPECT_EQ(res.trace.steps(), 2u);
    EXPECT_EQ(res.trace.termination, FmTermination::max_iterations);
}

TEST(RunFm, BadConfig) {
    const auto x = instances::radicals();
    FmConfig cfg;
    cfg.init = FromPointIndices{{0, 17}};
    EXPECT_THROW(run_fm(x, cfg, 2, 2), Error);
    cfg.init = FromPointIndices{{0}};
    EXPECT_THROW(run_fm(x, cfg, 2, 2), Error);
    cfg.init = RandomPoints{1};
    cfg.max_iterations = 0;
    EXPECT_THROW(run_fm(x, cfg, 2, 2), Error);
    cfg.max_iterations = 10;
    EXPECT_THROW(run_fm(x, cfg, 1, 2), Error);
}

TEST(RunFm, SinglePointOneStep) {
    const WeightedPointSet x = WeightedPointSet::unweighted({{3.0, 4.0}});
    FmConfig cfg;
    const auto res = run_fm(x, cfg, 2, 1);
    EXPECT_EQ(res.solution.cost(), 0.0);
    EXPECT_EQ(res.trace.steps(), 1u);
}

TEST(Sampling, DistinctAndWeightProportional) {
    const WeightedPointSet x({{0.0}, {1.0}, {2.0}}, {1.0, 0.0, 9.0});
    int first_is_heavy = 0;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const auto idx = sample_distinct_by_weight(x, 2, s);
        EXPECT_NE(idx[0], idx[1]);
        EXPECT_NE(idx[0], 1u);
        if (idx[0] == 2) ++first_is_heavy;
    }
    EXPECT_NEAR(first_is_heavy / 2000.0, 0.9, 0.03);
    // Zero-weight points are drawn only once the positive ones are exhausted.
    const auto all = sample_distinct_by_weight(x, 3, 5);
    EXPECT_EQ(all[2], 1u);
    EXPECT_EQ(sample_distinct_by_weight(x, 3, 5), all);
}
