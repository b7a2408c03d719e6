#pragma once

/**
 * @file fm.hpp
 * @brief The FM alternating heuristic: optimal memberships for fixed means,
 * then optimal means for fixed memberships, until the cost stabilizes.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "fuzzykm/core.hpp"
#include "fuzzykm/rng.hpp"

namespace fuzzykm {

struct FromPointIndices {
    std::vector<std::size_t> indices;
};

struct ExplicitMeans {
    MeanSet means;
};

/// K distinct input points drawn with probability proportional to weight.
struct RandomPoints {
    std::uint64_t seed = 0;
};

using FmInit = std::variant<FromPointIndices, ExplicitMeans, RandomPoints>;

struct FmConfig {
    std::size_t max_iterations = 10'000;
    /// Stop once (previous - current) <= tolerance * previous.
    double rel_cost_tolerance = 1e-10;
    FmInit init = RandomPoints{};
};

enum class FmTermination { converged, max_iterations };

constexpr std::string_view to_string(FmTermination t) noexcept {
    return t == FmTermination::converged ? "converged" : "max_iterations";
}

struct FmIteration {
    MeanSet means;
    /// Induced cost of `means`.
    double cost;
};

/// records[0] holds the initial means; records[i] the means after step i.
struct FmTrace {
    std::vector<FmIteration> records;
    FmTermination termination = FmTermination::max_iterations;

    std::size_t steps() const noexcept { return records.empty() ? 0 : records.size() - 1; }
};

struct FmResult {
    FuzzySolution solution;
    FmTrace trace;
};

/// Samples `count` distinct indices, each draw proportional to the weight of
/// the remaining points. Once only zero-weight points remain, draws are
/// uniform among them.
inline std::vector<std::size_t> sample_distinct_by_weight(const WeightedPointSet& x,
                                                          std::size_t count, std::uint64_t seed) {
    detail::require(count <= x.size(), ErrorKind::invalid_input,
                    "cannot draw " + std::to_string(count) + " distinct points from " +
                        std::to_string(x.size()));
    CounterRng rng(seed, 0x46d);
    std::vector<std::size_t> remaining(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) remaining[n] = n;
    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    while (chosen.size() < count) {
        double mass = 0.0;
        for (std::size_t n : remaining) mass += x.weight(n);
        std::size_t pick = remaining.size() - 1;
        if (mass > 0.0) {
            double u = rng.uniform() * mass;
            for (std::size_t i = 0; i < remaining.size(); ++i) {
                const double w = x.weight(remaining[i]);
                if (w > 0.0 && u < w) {
                    pick = i;
                    break;
                }
                u -= w;
            }
            // Rounding can run past the end; fall back to the last positive weight.
            if (x.weight(remaining[pick]) <= 0.0) {
                for (std::size_t i = remaining.size(); i-- > 0;) {
                    if (x.weight(remaining[i]) > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(remaining.size()));
        }
        chosen.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return chosen;
}

inline MeanSet initial_means(const WeightedPointSet& x, const FmInit& init, std::size_t k_count) {
    auto from_indices = [&](const std::vector<std::size_t>& idx) {
        detail::require(idx.size() == k_count, ErrorKind::invalid_input,
                        "init lists " + std::to_string(idx.size()) + " indices for K=" +
                            std::to_string(k_count));
        std::vector<Point> means;
        for (std::size_t i : idx) {
            detail::require(i < x.size(), ErrorKind::out_of_range,
                            "init index " + std::to_string(i) + " out of range for " +
                                std::to_string(x.size()) + " points");
            means.push_back(x.point(i));
        }
        return MeanSet(std::move(means));
    };
    return std::visit(
        [&](const auto& v) -> MeanSet {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FromPointIndices>) {
                return from_indices(v.indices);
            } else if constexpr (std::is_same_v<T, ExplicitMeans>) {
                detail::require(v.means.size() == k_count, ErrorKind::invalid_input,
                                "explicit init has the wrong number of means");
                detail::check_means(x, v.means);
                return v.means;
            } else {
                return from_indices(sample_distinct_by_weight(x, k_count, v.seed));
            }
        },
        init);
}

/// One alternation: memberships for `c`, then the means they induce.
inline std::pair<MeanSet, MembershipMatrix> fm_step(const WeightedPointSet& x, const MeanSet& c,
                                                    int m) {
    MembershipMatrix r = optimal_memberships(x, c, m);
    MeanSet next = optimal_means(x, r);
    return {std::move(next), std::move(r)};
}

inline FmResult run_fm(const WeightedPointSet& x, const FmConfig& config, int m,
                       std::size_t k_count) {
    require_fuzzifier(m);
    detail::require(k_count >= 1, ErrorKind::invalid_input, "K must be >= 1");
    detail::require(config.max_iterations >= 1, ErrorKind::invalid_input,
                    "max_iterations must be >= 1");
    detail::require(config.rel_cost_tolerance > 0.0, ErrorKind::invalid_input,
                    "rel_cost_tolerance must be positive");

    FmTrace trace;
    MeanSet current = initial_means(x, config.init, k_count);
    double cost = induced_cost_from_means(x, current, m);
    trace.records.push_back({current, cost});
    std::size_t best = 0;

    for (std::size_t it = 0; it < config.max_iterations; ++it) {
        MeanSet next = fm_step(x, current, m).first;
        const double next_cost = induced_cost_from_means(x, next, m);
        trace.records.push_back({next, next_cost});
        if (next_cost < trace.records[best].cost) best = trace.records.size() - 1;
        const double decrease = cost - next_cost;
        current = std::move(next);
        const bool stalled = cost <= 0.0 || decrease <= config.rel_cost_tolerance * cost;
        cost = next_cost;
        if (stalled) {
            trace.termination = FmTermination::converged;
            break;
        }
    }

    const MeanSet& winner = trace.records[best].means;
    FuzzySolution solution = FuzzySolution::induced(x, winner, m, Provenance::fm);
    return {std::move(solution), std::move(trace)};
}

}  // namespace fuzzykm
