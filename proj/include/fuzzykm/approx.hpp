#pragma once

/**
 * @file approx.hpp
 * @brief Superset-sampling candidate tuples, the randomized approximation
 * built on them, and the exhaustive (derandomized) variant.
 *
 * Candidate means are averages of fixed-size sub-multisets drawn from
 * weight-proportional samples of the input. Every K-tuple of candidates is
 * scored by its induced cost and the cheapest one is returned.
 *
 * The analysis duplicates each input point c times. Duplication leaves the
 * sampling distribution, the membership and mean formulas and the argmin
 * over candidates unchanged, so the algorithms run on X directly and only
 * report c.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzzykm/core.hpp"
#include "fuzzykm/rng.hpp"
#include "fuzzykm/search.hpp"

namespace fuzzykm {

namespace detail {

/// ceil that ignores representation error just above an integer.
inline std::uint64_t ceil_count(double value) {
    const double nearest = std::round(value);
    if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, nearest)) {
        return static_cast<std::uint64_t>(std::max(nearest, 0.0));
    }
    if (value >= 1.8e19) return combinatorics::kSaturated;
    return static_cast<std::uint64_t>(std::ceil(value));
}

inline void require_unit_interval(double value, const char* name) {
    require(value > 0.0 && value <= 1.0, ErrorKind::invalid_input,
            std::string(name) + " must lie in (0, 1]");
}

}  // namespace detail

struct SamplingOverrides {
    std::optional<std::uint64_t> repetitions;
    std::optional<std::uint64_t> multiset_size;
    std::optional<std::uint64_t> subset_size;
};

/// Parameters of the candidate construction. Sizes not overridden are
/// derived from the current epsilon and alpha on every query:
/// repetitions ceil(10 ln 2K), multiset ceil(4 / (alpha eps)), subset ceil(2 / eps).
struct SamplingParams {
    double epsilon = 1.0;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    SamplingOverrides overrides;

    std::uint64_t repetitions(std::size_t k_count) const {
        if (overrides.repetitions) return *overrides.repetitions;
        return detail::ceil_count(10.0 * std::log(2.0 * static_cast<double>(k_count)));
    }
    std::uint64_t multiset_size() const {
        if (overrides.multiset_size) return *overrides.multiset_size;
        return detail::ceil_count(4.0 / (alpha * epsilon));
    }
    std::uint64_t subset_size() const {
        if (overrides.subset_size) return *overrides.subset_size;
        return detail::ceil_count(2.0 / epsilon);
    }

    void validate(std::size_t k_count) const {
        detail::require_unit_interval(epsilon, "epsilon");
        detail::require_unit_interval(alpha, "alpha");
        detail::require(repetitions(k_count) >= 1 && multiset_size() >= 1 && subset_size() >= 1,
                        ErrorKind::invalid_input, "sampling sizes must be >= 1");
        detail::require(multiset_size() >= subset_size(), ErrorKind::invalid_input,
                        "multiset size must be at least the subset size");
    }
};

/// Indices of `size` independent draws, index n with probability w_n / W.
/// One uniform per draw, inverted against the cumulative weights.
inline std::vector<std::size_t> weighted_sample_multiset(const WeightedPointSet& x,
                                                         std::size_t size, std::uint64_t seed,
                                                         std::uint64_t stream = 0) {
    std::vector<double> cumulative(x.size());
    double running = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        running += x.weight(n);
        cumulative[n] = running;
    }
    CounterRng rng(seed, stream);
    std::vector<std::size_t> draws(size);
    for (auto& d : draws) {
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t n = static_cast<std::size_t>(it - cumulative.begin());
        if (n >= x.size()) {
            n = x.size() - 1;
            while (x.weight(n) == 0.0) --n;
        }
        d = n;
    }
    return draws;
}

/// The set T = M^K where M holds the means of every `subset_size` sub-multiset
/// (by draw position) of each sampled multiset. Tuples are decoded lazily.
class CandidateTupleSet {
public:
    CandidateTupleSet(std::vector<Point> candidate_means, std::size_t k_count,
                      SamplingParams params)
        : means_(std::move(candidate_means)), k_(k_count), params_(params) {}

    const std::vector<Point>& candidate_means() const noexcept { return means_; }
    std::size_t k() const noexcept { return k_; }
    const SamplingParams& params() const noexcept { return params_; }

    /// |M|^K, saturating.
    std::uint64_t size() const { return combinatorics::power(means_.size(), k_); }

    /// Tuple number i with the first mean as the most significant digit.
    MeanSet tuple(std::uint64_t i) const {
        std::vector<Point> mu(k_);
        for (std::size_t pos = k_; pos-- > 0;) {
            mu[pos] = means_[i % means_.size()];
            i /= means_.size();
        }
        return MeanSet(std::move(mu));
    }

private:
    std::vector<Point> means_;
    std::size_t k_;
    SamplingParams params_;
};

inline Point unweighted_mean(const WeightedPointSet& x, std::span<const std::size_t> idx) {
    Point mu(x.dim(), 0.0);
    for (std::size_t i : idx) {
        for (std::size_t d = 0; d < x.dim(); ++d) mu[d] += x.point(i)[d];
    }
    for (double& v : mu) v /= static_cast<double>(idx.size());
    return mu;
}

inline CandidateTupleSet build_candidate_tuples(const WeightedPointSet& x, std::size_t k_count,
                                                const SamplingParams& params,
                                                std::uint64_t cap = kDefaultEnumerationCap) {
    detail::require(k_count >= 1, ErrorKind::invalid_input, "K must be >= 1");
    params.validate(k_count);
    const std::uint64_t reps = params.repetitions(k_count);
    const std::uint64_t draw = params.multiset_size();
    const std::uint64_t sub = params.subset_size();

    const std::uint64_t per_rep = combinatorics::binomial(draw, sub);
    const std::uint64_t m_size = combinatorics::mul(reps, per_rep);
    const std::uint64_t t_size = combinatorics::power(m_size, k_count);
    if (t_size > cap) {
        detail::fail(ErrorKind::infeasible,
                     "candidate tuple set needs |M|^K = " +
                         (t_size == combinatorics::kSaturated ? std::string(">2^64")
                                                              : std::to_string(t_size)) +
                         " tuples (|M| = " + std::to_string(reps) + " x C(" +
                         std::to_string(draw) + "," + std::to_string(sub) +
                         ")), above the cap of " + std::to_string(cap) +
                         "; override the sampling sizes or raise the cap");
    }

    std::vector<Point> means;
    means.reserve(m_size);
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto sample = weighted_sample_multiset(x, draw, params.seed, r);
        std::vector<std::size_t> pos(sub);
        for (std::size_t i = 0; i < sub; ++i) pos[i] = i;
        std::vector<std::size_t> members(sub);
        do {
            for (std::size_t i = 0; i < sub; ++i) members[i] = sample[pos[i]];
            means.push_back(unweighted_mean(x, members));
        } while (detail::next_combination(pos, draw));
    }
    return CandidateTupleSet(std::move(means), k_count, params);
}

struct SearchOptions {
    std::uint64_t cap = kDefaultEnumerationCap;
    std::size_t threads = 1;
};

struct ApproxResult {
    FuzzySolution solution;
    /// The parameters actually used, after the internal substitution.
    SamplingParams params;
    std::uint64_t candidate_means = 0;
    std::uint64_t tuples_evaluated = 0;
    /// Number of copies per point the analysis assumes; not materialized.
    double duplication_factor = 0.0;
};

/// Duplication factor of the randomized analysis: ceil(16K / (alpha eps)).
inline double randomized_duplication_factor(std::size_t k_count, double epsilon, double alpha) {
    return std::ceil(16.0 * static_cast<double>(k_count) / (alpha * epsilon));
}

/// Duplication factor of the exhaustive analysis:
/// ceil(2 16^{m+1} m^m K^{2m+1} w_max / (w_min eps^{m+1})). Infinite when w_min = 0.
inline double ptas_duplication_factor(const WeightedPointSet& x, std::size_t k_count, int m,
                                      double epsilon) {
    const double k = static_cast<double>(k_count);
    const double w_min = x.min_weight();
    if (w_min <= 0.0) return INFINITY;
    return std::ceil(2.0 * std::pow(16.0, m + 1) * std::pow(m, m) * std::pow(k, 2 * m + 1) *
                     x.max_weight() / (w_min * std::pow(epsilon, m + 1)));
}

/// Evaluates every tuple of the candidate set built with epsilon / (16K)
/// and alpha / 2, returning the cheapest induced solution. Sizes in
/// `overrides` replace the derived ones.
inline ApproxResult randomized_approx(const WeightedPointSet& x, std::size_t k_count, int m,
                                      double epsilon, double alpha, std::uint64_t seed,
                                      const SamplingOverrides& overrides = {},
                                      const SearchOptions& options = {}) {
    require_fuzzifier(m);
    detail::require_unit_interval(epsilon, "epsilon");
    detail::require_unit_interval(alpha, "alpha");
    SamplingParams params;
    params.epsilon = epsilon / (16.0 * static_cast<double>(k_count));
    params.alpha = alpha / 2.0;
    params.seed = seed;
    params.overrides = overrides;

    const CandidateTupleSet set = build_candidate_tuples(x, k_count, params, options.cap);
    const auto& cands = set.candidate_means();
    const TupleSearchResult best =
        search_tuples(x, cands, k_count, m, TupleOrder::product, options.cap, options.threads);

    FuzzySolution sol = FuzzySolution::induced(x, best.means(cands), m, Provenance::randomized);
    return {std::move(sol), params, cands.size(), best.evaluated,
            randomized_duplication_factor(k_count, epsilon, alpha)};
}

struct PtasResult {
    FuzzySolution solution;
    std::uint64_t multiset_size = 0;
    /// Multisets of size s over the N points: C(N + s - 1, s).
    std::uint64_t multisets_enumerated = 0;
    std::uint64_t tuples_evaluated = 0;
    double duplication_factor = 0.0;
};

/// Means of every size-s multiset over X (s = ceil(32K / eps) unless
/// overridden), enumerated in lexicographic index order.
inline std::vector<Point> all_multiset_means(const WeightedPointSet& x, std::uint64_t s,
                                             std::uint64_t cap = kDefaultEnumerationCap) {
    detail::require(s >= 1, ErrorKind::invalid_input, "multiset size must be >= 1");
    const std::uint64_t count = combinatorics::multichoose(x.size(), s);
    if (count > cap) {
        detail::fail(ErrorKind::infeasible,
                     "exhaustive search needs C(N+s-1, s) = " +
                         (count == combinatorics::kSaturated ? std::string(">2^64")
                                                             : std::to_string(count)) +
                         " multisets (N=" + std::to_string(x.size()) + ", s=" + std::to_string(s) +
                         "), above the cap of " + std::to_string(cap) +
                         "; pass a smaller multiset size override or a smaller instance");
    }
    std::vector<Point> means;
    means.reserve(count);
    std::vector<std::size_t> idx(s, 0);
    do {
        means.push_back(unweighted_mean(x, idx));
    } while (detail::next_multiset(idx, x.size()));
    return means;
}

inline PtasResult deterministic_ptas(const WeightedPointSet& x, std::size_t k_count, int m,
                                     double epsilon,
                                     std::optional<std::uint64_t> multiset_size = std::nullopt,
                                     const SearchOptions& options = {}) {
    require_fuzzifier(m);
    detail::require(k_count >= 1, ErrorKind::invalid_input, "K must be >= 1");
    detail::require_unit_interval(epsilon, "epsilon");
    const std::uint64_t s =
        multiset_size ? *multiset_size
                      : detail::ceil_count(32.0 * static_cast<double>(k_count) / epsilon);
    const std::vector<Point> cands = all_multiset_means(x, s, options.cap);
    const TupleSearchResult best =
        search_tuples(x, cands, k_count, m, TupleOrder::product, options.cap, options.threads);
    FuzzySolution sol = FuzzySolution::induced(x, best.means(cands), m, Provenance::ptas);
    return {std::move(sol), s, cands.size(), best.evaluated,
            ptas_duplication_factor(x, k_count, m, epsilon)};
}

}  // namespace fuzzykm
