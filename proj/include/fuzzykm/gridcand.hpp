#pragma once

/**
 * @file gridcand.hpp
 * @brief Candidate means from exponential grids around a constant-factor
 * K-means solution, and the search for the best K of them.
 *
 * Around each anchor a_k the space is cut into rings
 *
 *     L_{k,0} = ball(a_k, R),   L_{k,j} = ball(a_k, 2^j R) \ ball(a_k, 2^{j-1} R),  j = 1..Phi,
 *
 * and each ring is overlaid with an axis-parallel lattice of side
 * rho_j = 2^j eps R / (b kappa sqrt(D)). The candidate set G is the set of
 * centers of every lattice cell that intersects its ring.
 *
 * Lattice cells are indexed by integer vectors i with center
 * a_k + rho_j (i + 1/2), so a_k is a cell corner. In units of rho_j every
 * ring has outer radius b kappa sqrt(D) / eps (and half that as inner
 * radius), independent of j; all ring predicates are evaluated in these
 * units so that counting and membership agree exactly.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzykm/core.hpp"
#include "fuzzykm/fm.hpp"
#include "fuzzykm/oracle.hpp"
#include "fuzzykm/rng.hpp"
#include "fuzzykm/search.hpp"

namespace fuzzykm {

inline constexpr double kGridConstant = 1208.0;
inline constexpr double kAnchorApproximation = 2.0;

// ---------------------------------------------------------------------------
// Constant-factor K-means

struct ConstFactorResult {
    MeanSet anchors;
    double cost;
    /// True when the exhaustive path ran, which guarantees cost <= 2 km_{X,K}.
    bool certified;
};

namespace detail {

inline void require_unit_weights(const WeightedPointSet& x) {
    require(x.unit_weights(), ErrorKind::invalid_input,
            "the grid construction accepts unweighted (unit-weight) input only");
}

/// Weighted Lloyd iterations from `init`; empty clusters keep their center.
inline MeanSet lloyd(const WeightedPointSet& x, MeanSet init, std::size_t iterations) {
    std::vector<Point> centers = init.means();
    const std::size_t k_count = centers.size();
    for (std::size_t it = 0; it < iterations; ++it) {
        std::vector<Point> sums(k_count, Point(x.dim(), 0.0));
        std::vector<double> mass(k_count, 0.0);
        for (std::size_t n = 0; n < x.size(); ++n) {
            std::size_t best = 0;
            double best_d = INFINITY;
            for (std::size_t k = 0; k < k_count; ++k) {
                const double d = squared_distance(x.point(n), centers[k]);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            mass[best] += x.weight(n);
            for (std::size_t d = 0; d < x.dim(); ++d) sums[best][d] += x.weight(n) * x.point(n)[d];
        }
        bool moved = false;
        for (std::size_t k = 0; k < k_count; ++k) {
            if (mass[k] <= 0.0) continue;
            for (std::size_t d = 0; d < x.dim(); ++d) {
                const double v = sums[k][d] / mass[k];
                if (v != centers[k][d]) moved = true;
                centers[k][d] = v;
            }
        }
        if (!moved) break;
    }
    return MeanSet(std::move(centers));
}

}  // namespace detail

/// Exhaustive best K-subset of input points when C(N,K) <= cap (a
/// 2-approximation of the continuous optimum); otherwise the best of seeded
/// Lloyd restarts, without a guarantee.
inline ConstFactorResult kmeans_constfactor(const WeightedPointSet& x, std::size_t k_count,
                                            std::uint64_t cap = kDefaultEnumerationCap,
                                            std::uint64_t seed = 0) {
    detail::require_unit_weights(x);
    detail::require(x.size() >= k_count, ErrorKind::invalid_input,
                    "K-means needs N >= K, got N=" + std::to_string(x.size()) +
                        " K=" + std::to_string(k_count));
    detail::require(k_count >= 1, ErrorKind::invalid_input, "K must be >= 1");
    if (combinatorics::binomial(x.size(), k_count) <= cap) {
        DiscreteKmeansResult best = discrete_kmeans_opt(x, k_count, cap);
        return {std::move(best.means), best.cost, true};
    }
    std::optional<MeanSet> best;
    double best_cost = INFINITY;
    for (std::size_t r = 0; r < 10; ++r) {
        std::vector<Point> init;
        for (std::size_t i : sample_distinct_by_weight(x, k_count, mix64(seed) ^ mix64(r + 1))) {
            init.push_back(x.point(i));
        }
        MeanSet centers = detail::lloyd(x, MeanSet(std::move(init)), 200);
        const double cost = kmeans_cost(x, centers);
        if (cost < best_cost) {
            best_cost = cost;
            best = std::move(centers);
        }
    }
    return {std::move(*best), best_cost, false};
}

// ---------------------------------------------------------------------------
// Grid parameters

struct GridParams {
    double epsilon = 1.0;
    /// Approximation factor assumed for the anchors (<= 2).
    double alpha = kAnchorApproximation;
    int m = 2;
    std::size_t k = 1;
    std::size_t dim = 1;
    std::size_t n = 1;
    /// km_X(A).
    double anchor_cost = 0.0;
    /// R = sqrt(km_X(A) / (alpha N)).
    double r_scale = 0.0;
    /// Index of the outermost ring level.
    int phi = 0;
    /// alpha K^{m-1}.
    double kappa = 1.0;
    double b = kGridConstant;

    static GridParams compute(std::size_t n_points, std::size_t dim, std::size_t k_count, int m,
                              double epsilon, double anchor_cost,
                              double alpha = kAnchorApproximation) {
        detail::require(epsilon > 0.0 && epsilon <= 1.0, ErrorKind::invalid_input,
                        "epsilon must lie in (0, 1]");
        detail::require(alpha > 0.0 && alpha <= 2.0, ErrorKind::invalid_input,
                        "anchor approximation factor must lie in (0, 2]");
        GridParams p;
        p.epsilon = epsilon;
        p.alpha = alpha;
        p.m = m;
        p.k = k_count;
        p.dim = dim;
        p.n = n_points;
        p.anchor_cost = anchor_cost;
        const double a_n = alpha * static_cast<double>(n_points);
        const double kk = static_cast<double>(k_count);
        p.r_scale = std::sqrt(anchor_cost / a_n);
        const double levels =
            0.5 * (std::log2(a_n) + m * std::log2(64.0 * alpha * m * kk * kk / epsilon));
        p.phi = std::max(0, static_cast<int>(std::ceil(levels)));
        p.kappa = alpha * std::pow(kk, m - 1);
        return p;
    }

    /// Lattice side on ring level j.
    double rho(int j) const {
        return std::ldexp(epsilon * r_scale / (b * kappa * std::sqrt(static_cast<double>(dim))), j);
    }

    /// Outer ring radius measured in cells of that ring.
    double outer_units() const { return b * kappa * std::sqrt(static_cast<double>(dim)) / epsilon; }

    double outer_radius(int j) const { return std::ldexp(r_scale, j); }

    /// K (Phi + 1) (12 b kappa / eps)^D.
    double size_bound() const {
        return static_cast<double>(k) * (phi + 1) *
               std::pow(12.0 * b * kappa / epsilon, static_cast<double>(dim));
    }
};

// ---------------------------------------------------------------------------
// Lattice counting in ring units

namespace detail {

inline std::int64_t floor_sqrt(double q) {
    if (q < 0.0) return -1;
    auto t = static_cast<std::int64_t>(std::floor(std::sqrt(q)));
    while (static_cast<double>(t + 1) * static_cast<double>(t + 1) <= q) ++t;
    while (t > 0 && static_cast<double>(t) * static_cast<double>(t) > q) --t;
    return t;
}

/// #{t in N^D : sum t_d^2 <= q}, with t_d >= lowest.
inline std::uint64_t lattice_count(std::size_t dim, double q, std::int64_t lowest) {
    if (q < 0.0) return 0;
    const std::int64_t top = floor_sqrt(q);
    if (top < lowest) return 0;
    if (dim == 1) return static_cast<std::uint64_t>(top - lowest + 1);
    std::uint64_t total = 0;
    for (std::int64_t t = lowest; t <= top; ++t) {
        total += lattice_count(dim - 1, q - static_cast<double>(t) * static_cast<double>(t), lowest);
    }
    return total;
}

/// Per-axis distance index of a cell: the nearest face of cell i lies t cells
/// from the anchor, the farthest t + 1.
inline std::int64_t axis_offset(std::int64_t i) noexcept { return i >= 0 ? i : -i - 1; }

}  // namespace detail

/// One ring L_{k,j} with its lattice.
struct GridRing {
    std::size_t anchor = 0;
    int level = 0;
};

/// A member of G: a lattice cell of one ring.
struct GridPoint {
    std::size_t ring = 0;
    std::vector<std::int64_t> cell;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

class CandidateGrid {
public:
    CandidateGrid(GridParams params, MeanSet anchors, bool anchors_certified)
        : params_(params), anchors_(std::move(anchors)), certified_(anchors_certified) {
        degenerate_ = !(params_.anchor_cost > 0.0);
        if (!degenerate_) {
            for (std::size_t k = 0; k < anchors_.size(); ++k) {
                for (int j = 0; j <= params_.phi; ++j) rings_.push_back({k, j});
            }
            const double u = params_.outer_units();
            q_outer_ = u * u;
            q_inner_ = 0.25 * u * u;
            ball_cells_ = combinatorics::mul(std::uint64_t{1} << params_.dim,
                                             detail::lattice_count(params_.dim, q_outer_, 0));
            const std::uint64_t inside = combinatorics::mul(
                std::uint64_t{1} << params_.dim, detail::lattice_count(params_.dim, q_inner_, 1));
            annulus_cells_ = ball_cells_ - inside;
        }
    }

    const GridParams& params() const noexcept { return params_; }
    const MeanSet& anchors() const noexcept { return anchors_; }
    bool anchors_certified() const noexcept { return certified_; }
    /// km_X(A) = 0: G is the anchor set itself.
    bool degenerate() const noexcept { return degenerate_; }
    const std::vector<GridRing>& rings() const noexcept { return rings_; }

    /// Cells emitted per ring: the ball on level 0, the annulus above.
    std::uint64_t ring_cell_count(std::size_t ring) const {
        return rings_[ring].level == 0 ? ball_cells_ : annulus_cells_;
    }

    /// Number of (ring, cell) members. Centers of different anchors' lattices
    /// that happen to coincide are counted once per ring, so this bounds the
    /// number of distinct points from above; lattices of one anchor never
    /// share centers.
    std::uint64_t size() const {
        if (degenerate_) return distinct_anchors().size();
        std::uint64_t total = 0;
        for (std::size_t r = 0; r < rings_.size(); ++r) {
            total = std::min(combinatorics::kSaturated - ring_cell_count(r), total) +
                    ring_cell_count(r);
        }
        return total;
    }

    double size_bound() const { return params_.size_bound(); }

    double rho(const GridRing& ring) const { return params_.rho(ring.level); }

    /// Whether lattice cell `cell` of `ring` intersects the ring.
    bool cell_in_ring(std::size_t ring, std::span<const std::int64_t> cell) const {
        double near = 0.0, far = 0.0;
        for (std::int64_t i : cell) {
            const auto t = static_cast<double>(detail::axis_offset(i));
            near += t * t;
            far += (t + 1.0) * (t + 1.0);
        }
        if (near > q_outer_) return false;
        return rings_[ring].level == 0 || far > q_inner_;
    }

    Point center(const GridPoint& gp) const {
        const GridRing& ring = rings_[gp.ring];
        const double side = rho(ring);
        const Point& a = anchors_[ring.anchor];
        Point c(a.size());
        for (std::size_t d = 0; d < a.size(); ++d) {
            c[d] = a[d] + side * (static_cast<double>(gp.cell[d]) + 0.5);
        }
        return c;
    }

    /// The cell of `ring` containing y, if that cell belongs to G.
    std::optional<GridPoint> cell_containing(std::size_t ring, std::span<const double> y) const {
        const GridRing& r = rings_[ring];
        const double side = rho(r);
        const Point& a = anchors_[r.anchor];
        GridPoint gp{ring, std::vector<std::int64_t>(a.size())};
        for (std::size_t d = 0; d < a.size(); ++d) {
            const double units = std::floor((y[d] - a[d]) / side);
            if (std::abs(units) > 9.0e15) return std::nullopt;
            gp.cell[d] = static_cast<std::int64_t>(units);
        }
        if (!cell_in_ring(ring, gp.cell)) return std::nullopt;
        return gp;
    }

    /// Whether y is (up to rounding) one of the representative points.
    bool contains(std::span<const double> y) const {
        if (degenerate_) {
            for (const auto& a : anchors_) {
                if (std::equal(a.begin(), a.end(), y.begin(), y.end())) return true;
            }
            return false;
        }
        for (std::size_t ring = 0; ring < rings_.size(); ++ring) {
            const double side = rho(rings_[ring]);
            const Point& a = anchors_[rings_[ring].anchor];
            GridPoint gp{ring, std::vector<std::int64_t>(a.size())};
            bool on_center = true;
            for (std::size_t d = 0; d < a.size() && on_center; ++d) {
                const double units = std::round((y[d] - a[d]) / side - 0.5);
                gp.cell[d] = static_cast<std::int64_t>(units);
                const double c = a[d] + side * (units + 0.5);
                on_center = std::abs(c - y[d]) <= 1e-9 * side + 1e-15 * std::abs(y[d]);
            }
            if (on_center && cell_in_ring(ring, gp.cell)) return true;
        }
        return false;
    }

    /// Ring level of y around anchor k, or nothing outside the outermost ring.
    std::optional<int> ring_level(std::size_t k, std::span<const double> y) const {
        const double dist = std::sqrt(squared_distance(y, anchors_[k]));
        for (int j = 0; j <= params_.phi; ++j) {
            if (in_ring_region(k, j, y, dist)) return j;
        }
        return std::nullopt;
    }

    /// Membership predicate of the region L_{k,j}.
    bool in_ring_region(std::size_t k, int j, std::span<const double> y) const {
        return in_ring_region(k, j, y, std::sqrt(squared_distance(y, anchors_[k])));
    }

    /// Every member of G, deduplicated and sorted; fails above `limit`.
    std::vector<Point> points(std::uint64_t limit) const {
        if (degenerate_) return distinct_anchors();
        const std::uint64_t total = size();
        detail::require(total <= limit, ErrorKind::infeasible,
                        "grid has " + std::to_string(total) +
                            " representatives, above the materialization limit of " +
                            std::to_string(limit));
        std::vector<Point> out;
        out.reserve(total);
        const std::size_t dim = params_.dim;
        for (std::size_t ring = 0; ring < rings_.size(); ++ring) {
            std::vector<std::int64_t> t(dim, 0);
            enumerate_offsets(ring, t, 0, 0.0, out);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Lattice moves from `gp`: one step along each axis in its own ring, and
    /// the cell containing its center in every other ring.
    std::vector<GridPoint> neighbors(const GridPoint& gp) const {
        std::vector<GridPoint> out;
        for (std::size_t d = 0; d < gp.cell.size(); ++d) {
            for (int step : {-1, 1}) {
                GridPoint next = gp;
                next.cell[d] += step;
                if (cell_in_ring(next.ring, next.cell)) out.push_back(std::move(next));
            }
        }
        const Point c = center(gp);
        for (std::size_t ring = 0; ring < rings_.size(); ++ring) {
            if (ring == gp.ring) continue;
            if (auto other = cell_containing(ring, c)) out.push_back(std::move(*other));
        }
        return out;
    }

    /// The member of G nearest to y among the cells containing y, preferring
    /// the finest ring; falls back to the nearest anchor-ring center.
    std::optional<GridPoint> snap(std::span<const double> y) const {
        std::optional<GridPoint> best;
        double best_d = INFINITY;
        for (std::size_t ring = 0; ring < rings_.size(); ++ring) {
            auto gp = cell_containing(ring, y);
            if (!gp) continue;
            const double d = squared_distance(center(*gp), y);
            if (d < best_d) {
                best_d = d;
                best = std::move(gp);
            }
        }
        return best;
    }

private:
    bool in_ring_region(std::size_t, int j, std::span<const double>, double dist) const {
        const double outer = params_.outer_radius(j);
        if (j == 0) return dist <= outer;
        return dist <= outer && dist > 0.5 * outer;
    }

    std::vector<Point> distinct_anchors() const {
        std::vector<Point> a = anchors_.means();
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        return a;
    }

    void enumerate_offsets(std::size_t ring, std::vector<std::int64_t>& t, std::size_t axis,
                           double partial, std::vector<Point>& out) const {
        const std::size_t dim = t.size();
        if (axis == dim) {
            // Every sign pattern: index t or -t-1 per axis.
            double far = 0.0;
            for (std::int64_t v : t) far += static_cast<double>(v + 1) * static_cast<double>(v + 1);
            if (rings_[ring].level != 0 && !(far > q_inner_)) return;
            GridPoint gp{ring, std::vector<std::int64_t>(dim)};
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
                for (std::size_t d = 0; d < dim; ++d) {
                    gp.cell[d] = (mask >> d) & 1U ? -t[d] - 1 : t[d];
                }
                out.push_back(center(gp));
            }
            return;
        }
        const std::int64_t top = detail::floor_sqrt(q_outer_ - partial);
        for (std::int64_t v = 0; v <= top; ++v) {
            t[axis] = v;
            enumerate_offsets(ring, t, axis + 1,
                              partial + static_cast<double>(v) * static_cast<double>(v), out);
        }
        t[axis] = 0;
    }

    GridParams params_;
    MeanSet anchors_;
    bool certified_ = false;
    bool degenerate_ = false;
    std::vector<GridRing> rings_;
    double q_outer_ = 0.0;
    double q_inner_ = 0.0;
    std::uint64_t ball_cells_ = 0;
    std::uint64_t annulus_cells_ = 0;
};

/// Anchors from `kmeans_constfactor`, then the ring lattices around them.
inline CandidateGrid build_grid(const WeightedPointSet& x, std::size_t k_count, int m,
                                double epsilon, std::uint64_t cap = kDefaultEnumerationCap) {
    require_fuzzifier(m);
    detail::require_unit_weights(x);
    ConstFactorResult anchors = kmeans_constfactor(x, k_count, cap);
    GridParams params =
        GridParams::compute(x.size(), x.dim(), k_count, m, epsilon, anchors.cost);
    return CandidateGrid(params, std::move(anchors.anchors), anchors.certified);
}

// ---------------------------------------------------------------------------
// Search over G

enum class GridSearchMode {
    /// Every K-multiset of the materialized G; fails above the caps.
    exhaustive,
    /// Discrete descent over lattice neighbors from FM-seeded starting tuples.
    /// Returns a member tuple of G without certifying that it is the best one.
    descent,
    /// exhaustive when it fits within the caps, descent otherwise.
    automatic,
};

constexpr std::string_view to_string(GridSearchMode mode) noexcept {
    switch (mode) {
        case GridSearchMode::exhaustive: return "exhaustive";
        case GridSearchMode::descent: return "descent";
        case GridSearchMode::automatic: return "automatic";
    }
    return "unknown";
}

struct GridSearchOptions {
    GridSearchMode mode = GridSearchMode::exhaustive;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::uint64_t materialize_limit = 5'000'000;
    std::size_t threads = 1;
    /// Extra FM-seeded starting tuples for descent, besides the anchors.
    std::size_t restarts = 4;
    std::uint64_t seed = 0;
    std::size_t max_descent_steps = 100'000;
};

struct GridSearchResult {
    FuzzySolution solution;
    GridSearchMode mode_used;
    std::uint64_t evaluated = 0;
};

/// `size` and `multichoose` both fit within the caps.
inline bool grid_fits_exhaustive(const CandidateGrid& grid, std::size_t k_count,
                                 const GridSearchOptions& options) {
    const std::uint64_t g = grid.size();
    return g <= options.materialize_limit &&
           combinatorics::multichoose(g, k_count) <= options.cap;
}

/// The nearest-member proxy of the anchors.
inline std::optional<MeanSet> snapped_anchors(const CandidateGrid& grid) {
    if (grid.degenerate()) return grid.anchors();
    std::vector<Point> mu;
    for (const auto& a : grid.anchors()) {
        auto gp = grid.snap(a);
        if (!gp) return std::nullopt;
        mu.push_back(grid.center(*gp));
    }
    return MeanSet(std::move(mu));
}

namespace detail {

struct DescentState {
    std::vector<GridPoint> members;
    MeanSet means;
    double cost;
};

inline DescentState grid_descent(const WeightedPointSet& x, const CandidateGrid& grid, int m,
                                 std::vector<GridPoint> start, std::size_t max_steps,
                                 std::uint64_t& evaluated) {
    auto means_of = [&](const std::vector<GridPoint>& members) {
        std::vector<Point> mu;
        mu.reserve(members.size());
        for (const auto& gp : members) mu.push_back(grid.center(gp));
        return MeanSet(std::move(mu));
    };
    DescentState state{start, means_of(start), 0.0};
    state.cost = induced_cost_from_means(x, state.means, m);
    ++evaluated;
    for (std::size_t step = 0; step < max_steps; ++step) {
        std::optional<DescentState> best;
        for (std::size_t k = 0; k < state.members.size(); ++k) {
            for (auto& cand : grid.neighbors(state.members[k])) {
                std::vector<GridPoint> members = state.members;
                members[k] = std::move(cand);
                MeanSet mu = means_of(members);
                const double cost = induced_cost_from_means(x, mu, m);
                ++evaluated;
                const bool better_than_best =
                    !best || cost < best->cost ||
                    (cost == best->cost && lexicographic_less(mu, best->means));
                if (cost < state.cost && better_than_best) {
                    best = DescentState{std::move(members), std::move(mu), cost};
                }
            }
        }
        if (!best) break;
        state = std::move(*best);
    }
    return state;
}

}  // namespace detail

inline GridSearchResult search_grid(const WeightedPointSet& x, const CandidateGrid& grid,
                                    std::size_t k_count, int m,
                                    const GridSearchOptions& options = {}) {
    require_fuzzifier(m);
    detail::require(grid.size() >= 1, ErrorKind::invalid_input, "candidate grid is empty");
    detail::require(grid.params().dim == x.dim(), ErrorKind::dimension_mismatch,
                    "grid and points differ in dimension");

    GridSearchMode mode = options.mode;
    if (mode == GridSearchMode::automatic) {
        mode = grid_fits_exhaustive(grid, k_count, options) ? GridSearchMode::exhaustive
                                                            : GridSearchMode::descent;
    }
    if (grid.degenerate()) mode = GridSearchMode::exhaustive;

    if (mode == GridSearchMode::exhaustive) {
        const std::uint64_t pairs = combinatorics::multichoose(grid.size(), k_count);
        if (pairs > options.cap) {
            detail::fail(ErrorKind::infeasible,
                         "exhaustive grid search needs C(|G|+K-1, K) = " +
                             (pairs == combinatorics::kSaturated ? std::string(">2^64")
                                                                 : std::to_string(pairs)) +
                             " tuples for |G| <= " + std::to_string(grid.size()) +
                             ", above the cap of " + std::to_string(options.cap) +
                             "; raise the cap or use the descent search");
        }
        const std::vector<Point> g = grid.points(options.materialize_limit);
        const TupleSearchResult best =
            search_tuples(x, g, k_count, m, TupleOrder::multiset, options.cap, options.threads);
        return {FuzzySolution::induced(x, best.means(g), m, Provenance::grid),
                GridSearchMode::exhaustive, best.evaluated};
    }

    // Descent: starting tuples are the anchors and FM solutions (from the
    // anchors and from seeded random points), each snapped into G.
    std::vector<MeanSet> seeds{grid.anchors()};
    {
        FmConfig fm;
        fm.init = ExplicitMeans{grid.anchors()};
        seeds.push_back(run_fm(x, fm, m, k_count).solution.means());
    }
    for (std::size_t r = 0; r < options.restarts; ++r) {
        if (x.size() < k_count) break;
        FmConfig fm;
        fm.init = RandomPoints{mix64(options.seed) ^ mix64(r + 0x9d)};
        seeds.push_back(run_fm(x, fm, m, k_count).solution.means());
    }

    std::uint64_t evaluated = 0;
    std::optional<detail::DescentState> best;
    for (const auto& seed : seeds) {
        std::vector<GridPoint> start;
        for (const auto& mu : seed) {
            auto gp = grid.snap(mu);
            if (!gp) break;
            start.push_back(std::move(*gp));
        }
        if (start.size() != k_count) continue;
        auto state =
            detail::grid_descent(x, grid, m, std::move(start), options.max_descent_steps, evaluated);
        if (!best || state.cost < best->cost ||
            (state.cost == best->cost && lexicographic_less(state.means, best->means))) {
            best = std::move(state);
        }
    }
    detail::require(best.has_value(), ErrorKind::degenerate,
                    "no starting tuple could be placed on the grid");
    return {FuzzySolution::induced(x, best->means, m, Provenance::grid), GridSearchMode::descent,
            evaluated};
}

}  // namespace fuzzykm
