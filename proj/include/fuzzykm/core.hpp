#pragma once

/**
 * @file core.hpp
 * @brief Domain types and the exact cost, membership and mean formulas of the
 * fuzzy K-means problem.
 *
 * The objective for weighted points (x_n, w_n), means mu_k, memberships r_nk
 * and fuzzifier m is
 *
 *     phi(C, R) = sum_n sum_k r_nk^m w_n ||x_n - mu_k||^2 ,   sum_k r_nk = 1.
 *
 * Everything here is a pure function of its arguments.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuzzykm/error.hpp"

namespace fuzzykm {

using Point = std::vector<double>;

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kCostTolerance = 1e-9;
inline constexpr double kCoincidenceScale = 1e-12;

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return sum;
}

inline double squared_norm(std::span<const double> a) noexcept {
    double sum = 0.0;
    for (double v : a) sum += v * v;
    return sum;
}

/// x^m for a small non-negative integer exponent.
inline double ipow(double x, int m) noexcept {
    double result = 1.0;
    for (int i = 0; i < m; ++i) result *= x;
    return result;
}

inline bool relative_close(double a, double b, double tolerance) noexcept {
    return std::abs(a - b) <= tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Relative-tolerance comparison without the absolute floor, for costs that
/// may legitimately be tiny.
inline bool relative_close_strict(double a, double b, double tolerance) noexcept {
    return std::abs(a - b) <= tolerance * std::max(std::abs(a), std::abs(b)) ||
           std::abs(a - b) <= 1e-300;
}

inline void require_fuzzifier(int m) {
    detail::require(m >= 2, ErrorKind::invalid_input,
                    "fuzzifier must be an integer >= 2, got " + std::to_string(m));
}

// ---------------------------------------------------------------------------

class WeightedPointSet {
public:
    WeightedPointSet(std::vector<Point> points, std::vector<double> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {
        using detail::require;
        require(!points_.empty(), ErrorKind::invalid_input, "point set must be nonempty");
        require(points_.size() == weights_.size(), ErrorKind::invalid_input,
                "point and weight counts differ");
        dim_ = points_.front().size();
        require(dim_ >= 1, ErrorKind::invalid_input, "points must have dimension >= 1");
        for (std::size_t n = 0; n < points_.size(); ++n) {
            require(points_[n].size() == dim_, ErrorKind::dimension_mismatch,
                    "point " + std::to_string(n) + " has dimension " +
                        std::to_string(points_[n].size()) + ", expected " + std::to_string(dim_));
            for (double v : points_[n]) {
                require(std::isfinite(v), ErrorKind::invalid_input,
                        "point " + std::to_string(n) + " has a non-finite coordinate");
            }
            require(std::isfinite(weights_[n]) && weights_[n] >= 0.0, ErrorKind::invalid_input,
                    "weight " + std::to_string(n) + " must be finite and non-negative");
        }
        total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        require(total_ > 0.0, ErrorKind::invalid_input, "total weight must be positive");
    }

    static WeightedPointSet unweighted(std::vector<Point> points) {
        std::vector<double> weights(points.size(), 1.0);
        return WeightedPointSet(std::move(points), std::move(weights));
    }

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const Point& point(std::size_t n) const { return points_[n]; }
    double weight(std::size_t n) const { return weights_[n]; }
    const std::vector<Point>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double total_weight() const noexcept { return total_; }
    double max_weight() const { return *std::max_element(weights_.begin(), weights_.end()); }
    double min_weight() const { return *std::min_element(weights_.begin(), weights_.end()); }

    bool unit_weights() const {
        return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
    }

    Point centroid() const {
        Point c(dim_, 0.0);
        for (std::size_t n = 0; n < size(); ++n) {
            for (std::size_t d = 0; d < dim_; ++d) c[d] += weights_[n] * points_[n][d];
        }
        for (double& v : c) v /= total_;
        return c;
    }

    WeightedPointSet scaled_weights(double factor) const {
        std::vector<double> w = weights_;
        for (double& v : w) v *= factor;
        return WeightedPointSet(points_, std::move(w));
    }

    WeightedPointSet translated(std::span<const double> shift) const {
        detail::require(shift.size() == dim_, ErrorKind::dimension_mismatch,
                        "translation vector dimension mismatch");
        std::vector<Point> p = points_;
        for (auto& x : p) {
            for (std::size_t d = 0; d < dim_; ++d) x[d] += shift[d];
        }
        return WeightedPointSet(std::move(p), weights_);
    }

    /// Every point repeated `copies` times, each copy keeping its weight.
    WeightedPointSet duplicated(std::size_t copies) const {
        detail::require(copies >= 1, ErrorKind::invalid_input, "copies must be >= 1");
        std::vector<Point> p;
        std::vector<double> w;
        p.reserve(size() * copies);
        w.reserve(size() * copies);
        for (std::size_t n = 0; n < size(); ++n) {
            for (std::size_t c = 0; c < copies; ++c) {
                p.push_back(points_[n]);
                w.push_back(weights_[n]);
            }
        }
        return WeightedPointSet(std::move(p), std::move(w));
    }

private:
    std::vector<Point> points_;
    std::vector<double> weights_;
    std::size_t dim_ = 0;
    double total_ = 0.0;
};

// ---------------------------------------------------------------------------

class MeanSet {
public:
    MeanSet(std::vector<Point> means) : means_(std::move(means)) {
        detail::require(!means_.empty(), ErrorKind::invalid_input, "mean set must be nonempty");
        const std::size_t dim = means_.front().size();
        detail::require(dim >= 1, ErrorKind::invalid_input, "means must have dimension >= 1");
        for (const auto& mu : means_) {
            detail::require(mu.size() == dim, ErrorKind::dimension_mismatch,
                            "means have inconsistent dimensions");
        }
    }

    std::size_t size() const noexcept { return means_.size(); }
    std::size_t dim() const noexcept { return means_.front().size(); }
    const Point& operator[](std::size_t k) const { return means_[k]; }
    const std::vector<Point>& means() const noexcept { return means_; }
    auto begin() const noexcept { return means_.begin(); }
    auto end() const noexcept { return means_.end(); }

    friend bool operator==(const MeanSet&, const MeanSet&) = default;

private:
    std::vector<Point> means_;
};

/// Lexicographic order on the flattened coordinates; used for tie-breaking.
inline bool lexicographic_less(const MeanSet& a, const MeanSet& b) {
    return a.means() < b.means();
}

// ---------------------------------------------------------------------------

class MembershipMatrix {
public:
    MembershipMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries, int m)
        : rows_(rows), cols_(cols), m_(m), entries_(std::move(entries)) {
        using detail::require;
        require_fuzzifier(m);
        require(rows_ >= 1 && cols_ >= 1, ErrorKind::invalid_input,
                "membership matrix needs at least one row and column");
        require(entries_.size() == rows_ * cols_, ErrorKind::invalid_input,
                "membership entry count does not match shape");
        for (std::size_t n = 0; n < rows_; ++n) {
            double sum = 0.0;
            for (std::size_t k = 0; k < cols_; ++k) {
                const double r = entries_[n * cols_ + k];
                require(r >= 0.0 && r <= 1.0, ErrorKind::invalid_input,
                        "membership (" + std::to_string(n) + "," + std::to_string(k) +
                            ") outside [0,1]");
                sum += r;
            }
            require(std::abs(sum - 1.0) <= kRowSumTolerance, ErrorKind::invalid_input,
                    "membership row " + std::to_string(n) + " does not sum to 1");
        }
    }

    static MembershipMatrix from_rows(const std::vector<std::vector<double>>& rows, int m) {
        detail::require(!rows.empty(), ErrorKind::invalid_input, "no membership rows");
        const std::size_t cols = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * cols);
        for (const auto& row : rows) {
            detail::require(row.size() == cols, ErrorKind::invalid_input, "ragged membership rows");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return MembershipMatrix(rows.size(), cols, std::move(flat), m);
    }

    static MembershipMatrix uniform(std::size_t rows, std::size_t cols, int m) {
        return MembershipMatrix(rows, cols,
                                std::vector<double>(rows * cols, 1.0 / static_cast<double>(cols)), m);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    int fuzzifier() const noexcept { return m_; }
    double operator()(std::size_t n, std::size_t k) const { return entries_[n * cols_ + k]; }
    double powered(std::size_t n, std::size_t k) const { return ipow((*this)(n, k), m_); }
    std::span<const double> row(std::size_t n) const {
        return {entries_.data() + n * cols_, cols_};
    }
    const std::vector<double>& entries() const noexcept { return entries_; }

    friend bool operator==(const MembershipMatrix&, const MembershipMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    int m_;
    std::vector<double> entries_;
};

// ---------------------------------------------------------------------------

namespace detail {

inline void check_means(const WeightedPointSet& x, const MeanSet& c) {
    require(c.dim() == x.dim(), ErrorKind::dimension_mismatch,
            "means have dimension " + std::to_string(c.dim()) + ", points have " +
                std::to_string(x.dim()));
}

inline void check_memberships(const WeightedPointSet& x, const MembershipMatrix& r) {
    require(r.rows() == x.size(), ErrorKind::dimension_mismatch,
            "membership matrix has " + std::to_string(r.rows()) + " rows for " +
                std::to_string(x.size()) + " points");
}

inline bool coincides(std::span<const double> x, double dist2) noexcept {
    const double threshold = kCoincidenceScale * (1.0 + std::sqrt(squared_norm(x)));
    return dist2 <= threshold * threshold;
}

/// ||x - mu||^{-2/(m-1)} expressed through the squared distance.
inline double inverse_power(double dist2, int m) noexcept {
    if (m == 2) return 1.0 / dist2;
    return std::pow(dist2, -1.0 / static_cast<double>(m - 1));
}

/// (sum_k ||x - mu_k||^{-2/(m-1)})^{-(m-1)}; zero when the sum is infinite.
inline double from_inverse_sum(double sum, int m) noexcept {
    if (std::isinf(sum)) return 0.0;
    if (m == 2) return 1.0 / sum;
    return std::pow(sum, -static_cast<double>(m - 1));
}

}  // namespace detail

/// x_n and mu_k coincide when ||x_n - mu_k|| <= 1e-12 (1 + ||x_n||).
inline bool coincident(std::span<const double> x, std::span<const double> mu) {
    return detail::coincides(x, squared_distance(x, mu));
}

// ---------------------------------------------------------------------------

inline double objective(const WeightedPointSet& x, const MeanSet& c, const MembershipMatrix& r) {
    detail::check_means(x, c);
    detail::check_memberships(x, r);
    detail::require(r.cols() == c.size(), ErrorKind::dimension_mismatch,
                    "membership columns do not match the number of means");
    double total = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            total += r.powered(n, k) * x.weight(n) * squared_distance(x.point(n), c[k]);
        }
    }
    return total;
}

/// Optimal membership row for a single point. Points coinciding with one or
/// more means split their membership uniformly among those means.
inline void optimal_membership_row(std::span<const double> xn, const MeanSet& c, int m,
                                   std::span<double> out) {
    const std::size_t k_count = c.size();
    std::size_t coinciding = 0;
    for (std::size_t k = 0; k < k_count; ++k) {
        const double d2 = squared_distance(xn, c[k]);
        if (detail::coincides(xn, d2)) {
            out[k] = -1.0;
            ++coinciding;
        } else {
            out[k] = detail::inverse_power(d2, m);
        }
    }
    if (coinciding > 0) {
        const double share = 1.0 / static_cast<double>(coinciding);
        for (std::size_t k = 0; k < k_count; ++k) out[k] = out[k] < 0.0 ? share : 0.0;
        return;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) sum += out[k];
    for (std::size_t k = 0; k < k_count; ++k) out[k] /= sum;
}

inline MembershipMatrix optimal_memberships(const WeightedPointSet& x, const MeanSet& c, int m) {
    require_fuzzifier(m);
    detail::check_means(x, c);
    const std::size_t k_count = c.size();
    std::vector<double> entries(x.size() * k_count);
    for (std::size_t n = 0; n < x.size(); ++n) {
        optimal_membership_row(x.point(n), c, m,
                               std::span<double>(entries.data() + n * k_count, k_count));
    }
    return MembershipMatrix(x.size(), k_count, std::move(entries), m);
}

struct MeanUpdate {
    MeanSet means;
    /// Columns with zero effective weight; their mean is the global centroid.
    std::vector<std::size_t> degenerate;
};

inline MeanUpdate optimal_means_checked(const WeightedPointSet& x, const MembershipMatrix& r) {
    detail::check_memberships(x, r);
    const std::size_t dim = x.dim();
    std::vector<Point> means(r.cols(), Point(dim, 0.0));
    std::vector<std::size_t> degenerate;
    for (std::size_t k = 0; k < r.cols(); ++k) {
        double mass = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double coef = r.powered(n, k) * x.weight(n);
            mass += coef;
            for (std::size_t d = 0; d < dim; ++d) means[k][d] += coef * x.point(n)[d];
        }
        if (mass > 0.0) {
            for (double& v : means[k]) v /= mass;
        } else {
            means[k] = x.centroid();
            degenerate.push_back(k);
        }
    }
    return {MeanSet(std::move(means)), std::move(degenerate)};
}

inline MeanSet optimal_means(const WeightedPointSet& x, const MembershipMatrix& r) {
    return optimal_means_checked(x, r).means;
}

/// Cost of the solution induced by the means: sum_n w_n (sum_k d_nk^{-2/(m-1)})^{-(m-1)}.
inline double induced_cost_from_means(const WeightedPointSet& x, const MeanSet& c, int m) {
    require_fuzzifier(m);
    detail::check_means(x, c);
    double total = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const auto& xn = x.point(n);
        double sum = 0.0;
        for (const auto& mu : c) {
            const double d2 = squared_distance(xn, mu);
            if (detail::coincides(xn, d2)) {
                sum = INFINITY;
                break;
            }
            sum += detail::inverse_power(d2, m);
        }
        total += x.weight(n) * detail::from_inverse_sum(sum, m);
    }
    return total;
}

inline double induced_cost_from_memberships(const WeightedPointSet& x, const MembershipMatrix& r) {
    return objective(x, optimal_means(x, r), r);
}

inline double kmeans_cost(const WeightedPointSet& x, const MeanSet& c) {
    detail::check_means(x, c);
    double total = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        double best = INFINITY;
        for (const auto& mu : c) best = std::min(best, squared_distance(x.point(n), mu));
        total += x.weight(n) * best;
    }
    return total;
}

// ---------------------------------------------------------------------------

/// Fuzzy cluster weights R_k = sum_n r_nk^m w_n.
struct ClusterWeights {
    std::vector<double> values;

    double min() const { return *std::min_element(values.begin(), values.end()); }
    double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
};

inline ClusterWeights cluster_weights(const WeightedPointSet& x, const MembershipMatrix& r) {
    detail::check_memberships(x, r);
    ClusterWeights out{std::vector<double>(r.cols(), 0.0)};
    for (std::size_t n = 0; n < x.size(); ++n) {
        for (std::size_t k = 0; k < r.cols(); ++k) out.values[k] += r.powered(n, k) * x.weight(n);
    }
    return out;
}

/// Cost of the k-th fuzzy cluster around its induced mean.
inline double per_cluster_cost(const WeightedPointSet& x, const MembershipMatrix& r, std::size_t k) {
    detail::check_memberships(x, r);
    detail::require(k < r.cols(), ErrorKind::out_of_range,
                    "cluster index " + std::to_string(k) + " out of range");
    const MeanSet means = optimal_means(x, r);
    double total = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        total += r.powered(n, k) * x.weight(n) * squared_distance(x.point(n), means[k]);
    }
    return total;
}

// ---------------------------------------------------------------------------

/// Weight, mean and K-means cost of a hard cluster.
struct HardClusterStats {
    double weight = 0.0;
    Point mean;
    double km = 0.0;
};

inline HardClusterStats hard_cluster_stats(const WeightedPointSet& x,
                                           std::span<const std::size_t> members) {
    detail::require(!members.empty(), ErrorKind::degenerate, "hard cluster is empty");
    HardClusterStats s;
    s.mean.assign(x.dim(), 0.0);
    for (std::size_t n : members) {
        detail::require(n < x.size(), ErrorKind::out_of_range, "cluster member index out of range");
        s.weight += x.weight(n);
        for (std::size_t d = 0; d < x.dim(); ++d) s.mean[d] += x.weight(n) * x.point(n)[d];
    }
    detail::require(s.weight > 0.0, ErrorKind::degenerate, "hard cluster has zero weight");
    for (double& v : s.mean) v /= s.weight;
    for (std::size_t n : members) s.km += x.weight(n) * squared_distance(x.point(n), s.mean);
    return s;
}

inline HardClusterStats hard_cluster_stats(const WeightedPointSet& x) {
    std::vector<std::size_t> all(x.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return hard_cluster_stats(x, all);
}

// ---------------------------------------------------------------------------

/// Weight threshold (eps / (4 m K^2))^m * min_n w_n below which a fuzzy cluster
/// can be merged away at a cost factor of at most (1 + eps / (2K)).
inline double pruning_threshold(const WeightedPointSet& x, std::size_t k_count, int m,
                                double epsilon) {
    const double k = static_cast<double>(k_count);
    return ipow(epsilon / (4.0 * m * k * k), m) * x.min_weight();
}

/// Repeatedly drops the lightest induced cluster whose weight is at or below
/// the pruning threshold, until every remaining cluster is heavier or one
/// mean is left. The threshold uses the original K.
inline MeanSet prune_small_clusters(const WeightedPointSet& x, const MeanSet& c, int m,
                                    double epsilon) {
    require_fuzzifier(m);
    detail::check_means(x, c);
    detail::require(epsilon > 0.0 && epsilon <= 1.0, ErrorKind::invalid_input,
                    "epsilon must lie in (0, 1]");
    const double threshold = pruning_threshold(x, c.size(), m, epsilon);
    std::vector<Point> kept = c.means();
    while (kept.size() > 1) {
        const MeanSet current(kept);
        const ClusterWeights weights = cluster_weights(x, optimal_memberships(x, current, m));
        std::size_t lightest = 0;
        for (std::size_t k = 1; k < kept.size(); ++k) {
            if (weights.values[k] < weights.values[lightest]) lightest = k;
        }
        if (weights.values[lightest] > threshold) break;
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(lightest));
    }
    return MeanSet(std::move(kept));
}

// ---------------------------------------------------------------------------

enum class Provenance { fm, randomized, ptas, grid, oracle, manual };

constexpr std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::fm: return "fm";
        case Provenance::randomized: return "randomized";
        case Provenance::ptas: return "ptas";
        case Provenance::grid: return "grid";
        case Provenance::oracle: return "oracle";
        case Provenance::manual: return "manual";
    }
    return "unknown";
}

/// Means, memberships and their cost. The cost is checked against the
/// objective at construction.
class FuzzySolution {
public:
    FuzzySolution(const WeightedPointSet& x, MeanSet means, MembershipMatrix memberships,
                  Provenance provenance)
        : means_(std::move(means)),
          memberships_(std::move(memberships)),
          cost_(objective(x, means_, memberships_)),
          provenance_(provenance) {}

    FuzzySolution(const WeightedPointSet& x, MeanSet means, MembershipMatrix memberships,
                  double cost, Provenance provenance)
        : means_(std::move(means)),
          memberships_(std::move(memberships)),
          cost_(cost),
          provenance_(provenance) {
        const double actual = objective(x, means_, memberships_);
        detail::require(cost_ >= 0.0 && relative_close(cost_, actual, kCostTolerance),
                        ErrorKind::invalid_input,
                        "solution cost " + std::to_string(cost_) +
                            " disagrees with the objective " + std::to_string(actual));
    }

    /// The solution induced by `means` (optimal memberships for those means).
    static FuzzySolution induced(const WeightedPointSet& x, MeanSet means, int m,
                                 Provenance provenance) {
        MembershipMatrix r = optimal_memberships(x, means, m);
        return FuzzySolution(x, std::move(means), std::move(r), provenance);
    }

    const MeanSet& means() const noexcept { return means_; }
    const MembershipMatrix& memberships() const noexcept { return memberships_; }
    double cost() const noexcept { return cost_; }
    Provenance provenance() const noexcept { return provenance_; }
    int fuzzifier() const noexcept { return memberships_.fuzzifier(); }

private:
    MeanSet means_;
    MembershipMatrix memberships_;
    double cost_;
    Provenance provenance_;
};

/// Strict weak order used when merging results: lower cost first, then
/// lexicographically smaller means.
inline bool better_solution(const FuzzySolution& a, const FuzzySolution& b) {
    if (a.cost() != b.cost()) return a.cost() < b.cost();
    return lexicographic_less(a.means(), b.means());
}

}  // namespace fuzzykm
