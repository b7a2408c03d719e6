#pragma once

/**
 * @file hardcluster.hpp
 * @brief Random rounding of fuzzy memberships into disjoint hard clusters,
 * and checks of how closely the hard clusters imitate the fuzzy ones.
 *
 * Point n joins cluster k with probability r_nk^m and stays unassigned with
 * probability 1 - sum_k r_nk^m, independently of the other points.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "fuzzykm/core.hpp"
#include "fuzzykm/rng.hpp"
#include "fuzzykm/search.hpp"

namespace fuzzykm {

inline constexpr int kUnassigned = -1;

/// Partial assignment of points to clusters; each point is in at most one.
class HardClustering {
public:
    HardClustering(std::vector<int> assignment, std::size_t clusters)
        : assignment_(std::move(assignment)), clusters_(clusters) {
        for (int a : assignment_) {
            detail::require(a == kUnassigned || (a >= 0 && static_cast<std::size_t>(a) < clusters_),
                            ErrorKind::out_of_range, "cluster label out of range");
        }
    }

    std::size_t size() const noexcept { return assignment_.size(); }
    std::size_t clusters() const noexcept { return clusters_; }
    int label(std::size_t n) const { return assignment_[n]; }
    const std::vector<int>& assignment() const noexcept { return assignment_; }

    /// z_nk.
    bool z(std::size_t n, std::size_t k) const {
        return assignment_[n] == static_cast<int>(k);
    }

    std::vector<std::size_t> members(std::size_t k) const {
        std::vector<std::size_t> out;
        for (std::size_t n = 0; n < assignment_.size(); ++n) {
            if (z(n, k)) out.push_back(n);
        }
        return out;
    }

    /// w(C_k).
    double weight(const WeightedPointSet& x, std::size_t k) const {
        double total = 0.0;
        for (std::size_t n = 0; n < assignment_.size(); ++n) {
            if (z(n, k)) total += x.weight(n);
        }
        return total;
    }

    /// Stats of C_k, or nothing when C_k is empty or weightless.
    std::optional<HardClusterStats> stats(const WeightedPointSet& x, std::size_t k) const {
        const auto m = members(k);
        if (m.empty() || weight(x, k) <= 0.0) return std::nullopt;
        return hard_cluster_stats(x, m);
    }

private:
    std::vector<int> assignment_;
    std::size_t clusters_;
};

/// One uniform draw per point against the cumulative row of r_nk^m.
inline HardClustering sample_hard_clusters(const WeightedPointSet& x, const MembershipMatrix& r,
                                           std::uint64_t seed, std::uint64_t stream = 0) {
    detail::check_memberships(x, r);
    CounterRng rng(seed, stream);
    std::vector<int> assignment(x.size(), kUnassigned);
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double u = rng.uniform();
        double cumulative = 0.0;
        for (std::size_t k = 0; k < r.cols(); ++k) {
            double p = r.powered(n, k);
            if (p < 1e-15) p = 0.0;
            cumulative += p;
            if (u < cumulative) {
                assignment[n] = static_cast<int>(k);
                break;
            }
        }
    }
    return HardClustering(std::move(assignment), r.cols());
}

/// eta_k = sqrt(sum_n p (1 - p) w_n^2) with p = r_nk^m: the standard deviation of w(C_k).
inline double weight_deviation(const WeightedPointSet& x, const MembershipMatrix& r,
                               std::size_t k) {
    double v = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double p = r.powered(n, k);
        v += p * (1.0 - p) * x.weight(n) * x.weight(n);
    }
    return std::sqrt(std::max(v, 0.0));
}

/// tau_k = sum_n p (1 - p) w_n^2 ||x_n - mu_k||^2.
inline double mean_deviation(const WeightedPointSet& x, const MembershipMatrix& r, std::size_t k,
                             std::span<const double> mu_k) {
    double t = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double p = r.powered(n, k);
        t += p * (1.0 - p) * x.weight(n) * x.weight(n) * squared_distance(x.point(n), mu_k);
    }
    return std::max(t, 0.0);
}

/// ||sum_n z_nk w_n (x_n - mu_k)||^2, whose expectation is tau_k when mu_k is
/// the mean induced by the memberships.
inline double deviation_numerator(const WeightedPointSet& x, const HardClustering& hc,
                                  std::size_t k, std::span<const double> mu_k) {
    Point sum(x.dim(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        if (!hc.z(n, k)) continue;
        for (std::size_t d = 0; d < x.dim(); ++d) sum[d] += x.weight(n) * (x.point(n)[d] - mu_k[d]);
    }
    return squared_norm(sum);
}

/// Minimum fuzzy cluster weight 16 K w_max / eps under which the rounding
/// guarantee is stated.
inline double rounding_weight_threshold(const WeightedPointSet& x, std::size_t k_count,
                                        double epsilon) {
    return 16.0 * static_cast<double>(k_count) * x.max_weight() / epsilon;
}

struct ClusterSimilarity {
    double fuzzy_weight = 0.0;  ///< R_k
    double fuzzy_cost = 0.0;    ///< phi_{X,k} at the induced mean
    Point fuzzy_mean;
    double eta = 0.0;
    double tau = 0.0;

    double hard_weight = 0.0;
    std::optional<Point> hard_mean;
    std::optional<double> hard_km;

    /// w(C_k) >= R_k / 2; slack = w(C_k) - R_k / 2.
    bool weight_pass = false;
    double weight_slack = 0.0;
    /// ||mu(C_k) - mu_k||^2 <= eps / (2 R_k) phi_k; nothing for an empty cluster.
    std::optional<bool> mean_pass;
    std::optional<double> mean_slack;
    /// km(C_k) <= 4 K phi_k; nothing for an empty cluster.
    std::optional<bool> cost_pass;
    std::optional<double> cost_slack;

    bool all_pass() const {
        return weight_pass && mean_pass.value_or(false) && cost_pass.value_or(false);
    }
};

struct SimilarityReport {
    std::vector<ClusterSimilarity> clusters;
    double epsilon = 0.0;
    double required_weight = 0.0;
    /// min_k R_k >= 16 K w_max / eps; reported, not enforced.
    bool precondition_met = false;

    bool all_pass() const {
        for (const auto& c : clusters) {
            if (!c.all_pass()) return false;
        }
        return true;
    }
};

inline SimilarityReport verify_similarity(const WeightedPointSet& x, const MembershipMatrix& r,
                                          const HardClustering& hc, double epsilon) {
    detail::check_memberships(x, r);
    detail::require(hc.size() == x.size() && hc.clusters() == r.cols(),
                    ErrorKind::dimension_mismatch, "hard clustering does not match the memberships");
    detail::require(epsilon > 0.0 && epsilon <= 1.0, ErrorKind::invalid_input,
                    "epsilon must lie in (0, 1]");

    const std::size_t k_count = r.cols();
    const MeanSet mu = optimal_means(x, r);
    const ClusterWeights weights = cluster_weights(x, r);

    SimilarityReport report;
    report.epsilon = epsilon;
    report.required_weight = rounding_weight_threshold(x, k_count, epsilon);
    report.precondition_met = weights.min() >= report.required_weight;

    for (std::size_t k = 0; k < k_count; ++k) {
        ClusterSimilarity c;
        c.fuzzy_weight = weights.values[k];
        c.fuzzy_mean = mu[k];
        c.fuzzy_cost = per_cluster_cost(x, r, k);
        c.eta = weight_deviation(x, r, k);
        c.tau = mean_deviation(x, r, k, mu[k]);
        c.hard_weight = hc.weight(x, k);
        c.weight_slack = c.hard_weight - 0.5 * c.fuzzy_weight;
        c.weight_pass = c.weight_slack >= 0.0 && c.hard_weight > 0.0;
        if (auto s = hc.stats(x, k)) {
            c.hard_mean = s->mean;
            c.hard_km = s->km;
            const double bound = c.fuzzy_weight > 0.0
                                     ? epsilon / (2.0 * c.fuzzy_weight) * c.fuzzy_cost
                                     : INFINITY;
            c.mean_slack = bound - squared_distance(s->mean, mu[k]);
            c.mean_pass = *c.mean_slack >= 0.0;
            c.cost_slack = 4.0 * static_cast<double>(k_count) * c.fuzzy_cost - s->km;
            c.cost_pass = *c.cost_slack >= 0.0;
        }
        report.clusters.push_back(std::move(c));
    }
    return report;
}

/// Fraction of `trials` roundings whose report passes every check. Trial t
/// draws from stream t of `seed`, so the result does not depend on threads.
inline double estimate_success_probability(const WeightedPointSet& x, const MembershipMatrix& r,
                                           double epsilon, std::size_t trials, std::uint64_t seed,
                                           std::size_t threads = 1) {
    detail::require(trials >= 1, ErrorKind::invalid_input, "trials must be >= 1");
    const std::size_t workers = std::min(detail::resolve_threads(threads), trials);
    std::vector<std::size_t> passes(workers, 0);
    auto run = [&](std::size_t w) {
        for (std::size_t t = w; t < trials; t += workers) {
            const HardClustering hc = sample_hard_clusters(x, r, seed, t);
            if (verify_similarity(x, r, hc, epsilon).all_pass()) ++passes[w];
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    std::size_t total = 0;
    for (std::size_t p : passes) total += p;
    return static_cast<double>(total) / static_cast<double>(trials);
}

}  // namespace fuzzykm
