#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force baselines used as ground truth on small instances:
 * best-of-restarts FM with coordinate refinement, the exact discrete
 * K-means optimum over input points, and a dense 1-D grid search.
 *
 * None of these is a certified global optimum for the fuzzy objective.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "fuzzykm/core.hpp"
#include "fuzzykm/fm.hpp"
#include "fuzzykm/rng.hpp"
#include "fuzzykm/search.hpp"

namespace fuzzykm {

struct OracleConfig {
    std::size_t restarts = 20;
    /// Sample points per coordinate line search during refinement (>= 3).
    std::size_t refinement = 9;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Gradient of the induced cost with respect to mean k:
/// 2 sum_n r_nk^m w_n (mu_k - x_n) with r the optimal memberships.
inline Point induced_cost_gradient(const WeightedPointSet& x, const MeanSet& c, int m,
                                   std::size_t k) {
    const MembershipMatrix r = optimal_memberships(x, c, m);
    Point g(x.dim(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double coef = 2.0 * r.powered(n, k) * x.weight(n);
        for (std::size_t d = 0; d < x.dim(); ++d) g[d] += coef * (c[k][d] - x.point(n)[d]);
    }
    return g;
}

namespace detail {

inline MeanSet with_coordinate(const MeanSet& c, std::size_t k, std::size_t d, double value) {
    std::vector<Point> mu = c.means();
    mu[k][d] = value;
    return MeanSet(std::move(mu));
}

inline double data_scale(const WeightedPointSet& x) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : x.points()) {
        for (double v : p) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return std::max(hi - lo, 1e-12);
}

/// Coordinate line search: every coordinate of every mean is probed at
/// `resolution` evenly spaced offsets within +-step; the step shrinks when a
/// full sweep finds no improvement. Accepts strict improvements only.
inline MeanSet refine_coordinates(const WeightedPointSet& x, MeanSet c, int m,
                                  std::size_t resolution, double start_step) {
    resolution = std::max<std::size_t>(resolution, 3);
    const double shrink = static_cast<double>(resolution - 1) / 2.0;
    double cost = induced_cost_from_means(x, c, m);
    double step = start_step;
    const double floor_step = 1e-13 * data_scale(x);
    while (step > floor_step) {
        bool improved = false;
        for (std::size_t k = 0; k < c.size(); ++k) {
            for (std::size_t d = 0; d < c.dim(); ++d) {
                const double base = c[k][d];
                double best_value = base;
                for (std::size_t i = 0; i < resolution; ++i) {
                    const double offset =
                        -step + 2.0 * step * static_cast<double>(i) / static_cast<double>(resolution - 1);
                    if (offset == 0.0) continue;
                    const MeanSet probe = with_coordinate(c, k, d, base + offset);
                    const double probe_cost = induced_cost_from_means(x, probe, m);
                    if (probe_cost < cost) {
                        cost = probe_cost;
                        best_value = base + offset;
                        improved = true;
                    }
                }
                if (best_value != base) c = with_coordinate(c, k, d, best_value);
            }
        }
        if (!improved) step /= shrink;
    }
    return c;
}

}  // namespace detail

/// Minimum over `restarts` FM runs from weighted-random input points, each
/// followed by coordinate refinement and a final FM polish.
inline FuzzySolution best_of_restarts(const WeightedPointSet& x, std::size_t k_count, int m,
                                      const OracleConfig& config) {
    detail::require(config.restarts >= 1, ErrorKind::invalid_input, "restarts must be >= 1");
    detail::require(k_count <= x.size(), ErrorKind::invalid_input,
                    "K exceeds the number of points");

    auto one = [&](std::size_t restart) {
        FmConfig fm;
        fm.init = RandomPoints{mix64(config.seed) ^ mix64(restart + 1)};
        FuzzySolution sol = run_fm(x, fm, m, k_count).solution;
        MeanSet refined = detail::refine_coordinates(x, sol.means(), m, config.refinement,
                                                     0.05 * detail::data_scale(x));
        FmConfig polish;
        polish.init = ExplicitMeans{refined};
        FuzzySolution polished = run_fm(x, polish, m, k_count).solution;
        const FuzzySolution& pick = better_solution(polished, sol) ? polished : sol;
        return FuzzySolution(x, pick.means(), pick.memberships(), Provenance::oracle);
    };

    const std::size_t workers = std::min(detail::resolve_threads(config.threads), config.restarts);
    std::vector<std::optional<FuzzySolution>> results(config.restarts);
    if (workers <= 1) {
        for (std::size_t r = 0; r < config.restarts; ++r) results[r] = one(r);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < config.restarts; r += workers) results[r] = one(r);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r) {
        if (better_solution(*results[r], *results[best])) best = r;
    }
    return std::move(*results[best]);
}

struct DiscreteKmeansResult {
    MeanSet means;
    double cost;
    std::vector<std::size_t> indices;
};

/// Exact minimum of the K-means cost over K-subsets of the input points.
/// Ties resolve to the lexicographically first index combination.
inline DiscreteKmeansResult discrete_kmeans_opt(const WeightedPointSet& x, std::size_t k_count,
                                                std::uint64_t cap = kDefaultEnumerationCap) {
    detail::require(k_count >= 1 && k_count <= x.size(), ErrorKind::invalid_input,
                    "K must lie in [1, N]");
    const std::uint64_t count = combinatorics::binomial(x.size(), k_count);
    detail::require(count <= cap, ErrorKind::infeasible,
                    "C(N,K) = " + std::to_string(count) + " exceeds the enumeration cap " +
                        std::to_string(cap));

    const std::size_t n_points = x.size();
    std::vector<double> d2(n_points * n_points);
    for (std::size_t a = 0; a < n_points; ++a) {
        for (std::size_t b = 0; b < n_points; ++b) {
            d2[a * n_points + b] = squared_distance(x.point(a), x.point(b));
        }
    }

    std::vector<std::size_t> idx(k_count);
    for (std::size_t i = 0; i < k_count; ++i) idx[i] = i;
    std::vector<std::size_t> best_idx;
    double best = INFINITY;
    do {
        double cost = 0.0;
        for (std::size_t n = 0; n < n_points; ++n) {
            double near = INFINITY;
            for (std::size_t i : idx) near = std::min(near, d2[i * n_points + n]);
            cost += x.weight(n) * near;
        }
        if (cost < best) {
            best = cost;
            best_idx = idx;
        }
    } while (detail::next_combination(idx, n_points));

    std::vector<Point> mu;
    for (std::size_t i : best_idx) mu.push_back(x.point(i));
    MeanSet means(std::move(mu));
    return {means, kmeans_cost(x, means), best_idx};
}

struct Bracket {
    double lo;
    double hi;
};

namespace detail {

inline double golden_section(const auto& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

/// Root of a sign-changing function on [lo, hi] by bisection to machine
/// resolution.
inline std::optional<double> bisect_root(const auto& g, double lo, double hi) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo < 0.0) == (ghi < 0.0)) return std::nullopt;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Dense search over sorted mean tuples on a 1-D grid, then per-coordinate
/// golden-section polish, then a bisection on the analytic partial
/// derivative to pin each coordinate at a stationary point.
inline FuzzySolution grid_refine_1d(const WeightedPointSet& x, std::size_t k_count, int m,
                                    Bracket bracket, std::size_t resolution) {
    require_fuzzifier(m);
    detail::require(x.dim() == 1, ErrorKind::invalid_input, "grid_refine_1d needs D = 1");
    detail::require(k_count >= 1, ErrorKind::invalid_input, "K must be >= 1");
    detail::require(bracket.hi > bracket.lo, ErrorKind::invalid_input, "empty bracket");
    detail::require(resolution >= 2, ErrorKind::invalid_input, "resolution must be >= 2");

    std::vector<Point> grid(resolution);
    const double spacing = (bracket.hi - bracket.lo) / static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < resolution; ++i) {
        grid[i] = {bracket.lo + spacing * static_cast<double>(i)};
    }
    const TupleSearchResult coarse =
        search_tuples(x, grid, k_count, m, TupleOrder::multiset, combinatorics::kSaturated);
    MeanSet c = coarse.means(grid);
    double cost = induced_cost_from_means(x, c, m);

    // Golden-section sweeps within one grid spacing of the current value.
    for (int sweep = 0; sweep < 100; ++sweep) {
        const double before = cost;
        for (std::size_t k = 0; k < k_count; ++k) {
            const double base = c[k][0];
            auto f = [&](double v) {
                return induced_cost_from_means(x, detail::with_coordinate(c, k, 0, v), m);
            };
            const double v = detail::golden_section(f, base - spacing, base + spacing, 1e-12);
            const double fv = f(v);
            if (fv < cost) {
                c = detail::with_coordinate(c, k, 0, v);
                cost = fv;
            }
        }
        if (before - cost <= 1e-15 * before) break;
    }

    // Stationarity polish: each partial derivative is driven to zero while the
    // other coordinates stay fixed; repeated until the tuple stops moving.
    for (int sweep = 0; sweep < 200; ++sweep) {
        double moved = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            const double base = c[k][0];
            auto g = [&](double v) {
                return induced_cost_gradient(x, detail::with_coordinate(c, k, 0, v), m, k)[0];
            };
            const double radius = std::max(1e-6, 1e-3 * spacing);
            const auto root = detail::bisect_root(g, base - radius, base + radius);
            if (!root) continue;
            const MeanSet trial = detail::with_coordinate(c, k, 0, *root);
            const double trial_cost = induced_cost_from_means(x, trial, m);
            if (trial_cost <= cost * (1.0 + 1e-15)) {
                moved = std::max(moved, std::abs(*root - base));
                c = trial;
                cost = std::min(cost, trial_cost);
            }
        }
        if (moved <= 1e-15) break;
    }

    return FuzzySolution::induced(x, c, m, Provenance::oracle);
}

}  // namespace fuzzykm
