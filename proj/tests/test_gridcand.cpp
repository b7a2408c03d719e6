#include <gtest/gtest.h>

#include <set>

#include "reference.hpp"

using namespace fuzzykm;

namespace {

WeightedPointSet line(std::initializer_list<double> v) {
    std::vector<Point> p;
    for (double x : v) p.push_back({x});
    return WeightedPointSet::unweighted(p);
}

std::uint64_t brute_lattice(std::size_t dim, double q, std::int64_t lowest) {
    const auto top = static_cast<std::int64_t>(std::sqrt(q)) + 1;
    std::uint64_t count = 0;
    std::vector<std::int64_t> t(dim, lowest);
    while (true) {
        double s = 0;
        for (auto v : t) s += static_cast<double>(v * v);
        if (s <= q) ++count;
        std::size_t d = 0;
        while (d < dim && ++t[d] > top) t[d++] = lowest;
        if (d == dim) break;
    }
    return count;
}

}  // namespace

TEST(ConstFactor, DistinctPointsAreTheirOwnAnchors) {
    const auto x = line({3.0, -1.0, 7.0});
    const auto a = kmeans_constfactor(x, 3);
    EXPECT_EQ(a.cost, 0.0);
    EXPECT_TRUE(a.certified);
    std::set<double> got;
    for (const auto& mu : a.anchors) got.insert(mu[0]);
    EXPECT_EQ(got, (std::set<double>{-1.0, 3.0, 7.0}));
}

TEST(ConstFactor, RadicalsAnchors) {
    const auto a = kmeans_constfactor(instances::radicals(), 2);
    EXPECT_EQ(a.anchors, MeanSet({{-2.0}, {2.0}}));
    EXPECT_DOUBLE_EQ(a.cost, 4.0);
    EXPECT_DOUBLE_EQ(a.cost, ref::discrete_kmeans(instances::radicals(), 2));
}

TEST(ConstFactor, WithinTwiceTheContinuousOptimum) {
    // Two symmetric pairs: the optimal 2-means puts a centroid at each pair.
    ref::Generator g(51);
    for (int t = 0; t < 20; ++t) {
        const double s = g.uniform(0.1, 2.0), gap = g.uniform(5.0, 50.0);
        const auto x = line({-gap - s, -gap + s, gap - s, gap + s});
        const double opt = 4.0 * s * s;
        const auto a = kmeans_constfactor(x, 2);
        EXPECT_LE(a.cost, 2.0 * opt * (1 + 1e-12));
    }
}

TEST(ConstFactor, Errors) {
    EXPECT_THROW(kmeans_constfactor(line({1.0}), 2), Error);
    EXPECT_THROW(kmeans_constfactor(WeightedPointSet({{0.0}, {1.0}}, {1.0, 2.0}), 1), Error);
}

TEST(ConstFactor, FallbackIsFlagged) {
    ref::Generator g(52);
    const auto x = g.points(40, 2, false);
    const auto a = kmeans_constfactor(x, 3, 100);
    EXPECT_FALSE(a.certified);
    EXPECT_EQ(a.anchors.size(), 3u);
    EXPECT_LE(a.cost, kmeans_cost(x, MeanSet({x.point(0), x.point(1), x.point(2)})));
}

TEST(GridParams, Derived) {
    const auto p = GridParams::compute(4, 1, 2, 2, 0.5, 2.0);
    EXPECT_DOUBLE_EQ(p.b, 1208.0);
    EXPECT_DOUBLE_EQ(p.r_scale, 0.5);
    EXPECT_DOUBLE_EQ(p.kappa, 4.0);
    // ceil(0.5 (log2 8 + 2 log2(64*2*2*4/0.5))) = ceil(0.5 (3 + 2*11)) = 13
    EXPECT_EQ(p.phi, 13);
    EXPECT_DOUBLE_EQ(p.rho(0), 0.5 * 0.5 / (1208.0 * 4.0));
    EXPECT_DOUBLE_EQ(p.rho(3), 8 * p.rho(0));
    EXPECT_THROW(GridParams::compute(4, 1, 2, 2, 1.5, 2.0), Error);
    EXPECT_THROW(GridParams::compute(4, 1, 2, 2, 0.5, 2.0, 3.0), Error);
}

TEST(Grid, LatticeCountsMatchBruteForce) {
    for (std::size_t dim : {1u, 2u, 3u}) {
        for (double q : {0.0, 1.0, 2.5, 17.0, 50.3}) {
            EXPECT_EQ(detail::lattice_count(dim, q, 0), brute_lattice(dim, q, 0));
            EXPECT_EQ(detail::lattice_count(dim, q, 1), brute_lattice(dim, q, 1));
        }
    }
}

TEST(Grid, IdenticalPointsCollapse) {
    const auto x = line({4.0, 4.0, 4.0});
    const auto grid = build_grid(x, 2, 2, 0.5);
    EXPECT_TRUE(grid.degenerate());
    EXPECT_EQ(grid.size(), 1u);
    EXPECT_EQ(grid.points(10), (std::vector<Point>{{4.0}}));
    const auto res = search_grid(x, grid, 2, 2);
    EXPECT_EQ(res.solution.cost(), 0.0);
}

TEST(Grid, SizeWithinBound) {
    const auto x = line({0.0, 1.0, 10.0, 11.0});
    const auto grid = build_grid(x, 2, 2, 0.5);
    EXPECT_LE(static_cast<double>(grid.size()), grid.size_bound());
    ref::Generator g(53);
    const auto y = g.points(8, 2, false);
    const auto g2 = build_grid(y, 2, 2, 0.5);
    EXPECT_LE(static_cast<double>(g2.size()), g2.size_bound());
}

TEST(Grid, SizeCountsMaterializedMembers) {
    // One anchor: lattices of different levels never share centers.
    const auto x = line({0.0, 1.0, 3.0});
    const auto grid = build_grid(x, 1, 2, 1.0);
    const auto pts = grid.points(10'000'000);
    EXPECT_EQ(pts.size(), grid.size());
    for (std::size_t i = 0; i < pts.size(); i += 97) EXPECT_TRUE(grid.contains(pts[i]));
    // Two anchors may share centers, so size() only bounds the distinct count.
    const auto two = build_grid(line({0.0, 1.0, 10.0, 11.0}), 2, 2, 1.0);
    EXPECT_LE(two.points(10'000'000).size(), two.size());
}

TEST(Grid, RingsPartitionTheBall) {
    ref::Generator g(54);
    const auto y = g.points(8, 2, false);
    const auto grid = build_grid(y, 2, 2, 0.5);
    const auto& p = grid.params();
    const double outer = p.outer_radius(p.phi);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t k = g.index(0, 1);
        // Log-uniform radius so every ring gets probes.
        const double radius = outer * std::exp2(-g.uniform(0.0, p.phi + 2.0)) * 1.2;
        const double angle = g.uniform(0.0, 2 * M_PI);
        const Point probe{grid.anchors()[k][0] + radius * std::cos(angle),
                          grid.anchors()[k][1] + radius * std::sin(angle)};
        int rings = 0;
        for (int j = 0; j <= p.phi; ++j) rings += grid.in_ring_region(k, j, probe);
        const bool inside = std::sqrt(ref::dist2(probe, grid.anchors()[k])) <= outer;
        EXPECT_EQ(rings, inside ? 1 : 0);
    }
}

TEST(Grid, CoverageWithinHalfDiagonal) {
    ref::Generator g(55);
    const auto y = g.points(8, 2, false);
    const auto grid = build_grid(y, 2, 2, 0.5);
    const auto& p = grid.params();
    for (int t = 0; t < 2000; ++t) {
        const std::size_t k = g.index(0, 1);
        const double radius = p.outer_radius(p.phi) * std::exp2(-g.uniform(0.0, p.phi + 2.0));
        const double angle = g.uniform(0.0, 2 * M_PI);
        const Point probe{grid.anchors()[k][0] + radius * std::cos(angle),
                          grid.anchors()[k][1] + radius * std::sin(angle)};
        const auto level = grid.ring_level(k, probe);
        ASSERT_TRUE(level.has_value());
        const std::size_t ring = k * (p.phi + 1) + static_cast<std::size_t>(*level);
        ASSERT_EQ(grid.rings()[ring].anchor, k);
        const auto cell = grid.cell_containing(ring, probe);
        ASSERT_TRUE(cell.has_value()) << "probe at radius " << radius;
        const Point c = grid.center(*cell);
        EXPECT_LE(std::sqrt(ref::dist2(c, probe)), p.rho(*level) * std::sqrt(2.0) / 2 * (1 + 1e-9));
        EXPECT_TRUE(grid.contains(c));
    }
}

TEST(Grid, CellsOutsideTheRingAreRejected) {
    const auto grid = build_grid(line({0.0, 1.0, 10.0, 11.0}), 2, 2, 0.5);
    const auto& p = grid.params();
    const double u = p.outer_units();
    // Level 1 annulus: cell 0 touches the anchor, well inside the inner radius u/2.
    EXPECT_FALSE(grid.cell_in_ring(1, std::vector<std::int64_t>{0}));
    EXPECT_TRUE(grid.cell_in_ring(0, std::vector<std::int64_t>{0}));
    const auto edge = static_cast<std::int64_t>(std::floor(u));
    EXPECT_TRUE(grid.cell_in_ring(1, std::vector<std::int64_t>{edge}));
    EXPECT_FALSE(grid.cell_in_ring(1, std::vector<std::int64_t>{edge + 1}));
}

TEST(GridSearch, FourPointsWithinOnePlusEps) {
    const auto x = line({0.0, 1.0, 10.0, 11.0});
    const auto grid = build_grid(x, 2, 2, 0.5);
    OracleConfig oc;
    oc.restarts = 20;
    const double oracle = best_of_restarts(x, 2, 2, oc).cost();
    GridSearchOptions opts;
    opts.mode = GridSearchMode::descent;
    const auto res = search_grid(x, grid, 2, 2, opts);
    EXPECT_LE(res.solution.cost(), 1.5 * oracle);
    for (const auto& mu : res.solution.means()) EXPECT_TRUE(grid.contains(mu));
    const auto proxy = snapped_anchors(grid);
    ASSERT_TRUE(proxy.has_value());
    EXPECT_LE(res.solution.cost(), induced_cost_from_means(x, *proxy, 2));
}

TEST(GridSearch, ExhaustiveMatchesIndependentEnumerator) {
    const auto x = line({0.0, 1.0, 3.0});
    const auto grid = build_grid(x, 1, 2, 1.0);
    const auto res = search_grid(x, grid, 1, 2);
    EXPECT_EQ(res.mode_used, GridSearchMode::exhaustive);
    EXPECT_EQ(res.evaluated, grid.size());
    const double brute = ref::best_tuple_cost(x, grid.points(10'000'000), 1, 2);
    EXPECT_TRUE(relative_close(res.solution.cost(), brute, 1e-12));
    // And descent, started from the same anchors, cannot beat the full scan.
    GridSearchOptions opts;
    opts.mode = GridSearchMode::descent;
    EXPECT_GE(search_grid(x, grid, 1, 2, opts).solution.cost(), res.solution.cost());
}

TEST(GridSearch, ZeroCostWhenGridContainsX) {
    const auto x = line({2.0, 5.0});
    const auto grid = build_grid(x, 2, 2, 0.5);
    ASSERT_TRUE(grid.degenerate());
    EXPECT_EQ(search_grid(x, grid, 2, 2).solution.cost(), 0.0);
}

TEST(GridSearch, ExhaustiveCapError) {
    const auto x = line({0.0, 1.0, 10.0, 11.0});
    const auto grid = build_grid(x, 2, 2, 0.5);
    try {
        search_grid(x, grid, 2, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
    }
    GridSearchOptions opts;
    opts.mode = GridSearchMode::automatic;
    EXPECT_EQ(search_grid(x, grid, 2, 2, opts).mode_used, GridSearchMode::descent);
}

TEST(GridSearch, RejectsWeightedInput) {
    const WeightedPointSet x({{0.0}, {1.0}, {5.0}}, {1.0, 2.0, 1.0});
    EXPECT_THROW(build_grid(x, 2, 2, 0.5), Error);
}
