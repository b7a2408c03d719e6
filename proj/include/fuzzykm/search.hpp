#pragma once

/**
 * @file search.hpp
 * @brief Exhaustive minimization of the induced cost over tuples of
 * candidate means, plus the saturating combinatorics used to guard the
 * enumeration sizes.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fuzzykm/core.hpp"

namespace fuzzykm {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Saturating arithmetic: results above UINT64_MAX clamp to UINT64_MAX.
namespace combinatorics {

inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) noexcept {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
}

inline std::uint64_t power(std::uint64_t base, std::uint64_t exponent) noexcept {
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) {
        result = mul(result, base);
        if (result == kSaturated) break;
    }
    return result;
}

/// C(n, k), saturating.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return 0;
    k = std::min(k, n - k);
    // Multiplicative form in 128-bit keeps every intermediate exact until it
    // exceeds 64 bits.
    __extension__ using u128 = unsigned __int128;
    u128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > kSaturated) return kSaturated;
    }
    return static_cast<std::uint64_t>(result);
}

/// Number of multisets of size k over n items: C(n + k - 1, k).
inline std::uint64_t multichoose(std::uint64_t n, std::uint64_t k) noexcept {
    if (n == 0) return k == 0 ? 1 : 0;
    if (n - 1 > kSaturated - k) return kSaturated;
    return binomial(n + k - 1, k);
}

}  // namespace combinatorics

namespace detail {

/// Advances `idx` to the next k-combination of {0..n-1} in lexicographic
/// order. Returns false after the last combination.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

/// Next nondecreasing sequence over {0..n-1}.
inline bool next_multiset(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] + 1 < n) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[i];
            return true;
        }
    }
    return false;
}

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
    return requested;
}

}  // namespace detail

/// Per-candidate inverse powered distances ||x_n - c||^{-2/(m-1)}, stored
/// as +inf where x_n coincides with c. Summing a column over a tuple and
/// applying `from_inverse_sum` gives the point's induced cost.
class InverseDistanceTable {
public:
    InverseDistanceTable(const WeightedPointSet& x, std::span<const Point> candidates, int m)
        : points_(x.size()), m_(m), weights_(x.weights()) {
        require_fuzzifier(m);
        values_.resize(candidates.size() * points_);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            detail::require(candidates[c].size() == x.dim(), ErrorKind::dimension_mismatch,
                            "candidate dimension mismatch");
            for (std::size_t n = 0; n < points_; ++n) {
                const double d2 = squared_distance(x.point(n), candidates[c]);
                values_[c * points_ + n] =
                    detail::coincides(x.point(n), d2) ? INFINITY : detail::inverse_power(d2, m);
            }
        }
    }

    std::size_t candidates() const noexcept { return values_.size() / points_; }

    double tuple_cost(std::span<const std::size_t> tuple) const noexcept {
        double total = 0.0;
        for (std::size_t n = 0; n < points_; ++n) {
            double sum = 0.0;
            for (std::size_t idx : tuple) sum += values_[idx * points_ + n];
            total += weights_[n] * detail::from_inverse_sum(sum, m_);
        }
        return total;
    }

private:
    std::size_t points_;
    int m_;
    std::vector<double> weights_;
    std::vector<double> values_;
};

enum class TupleOrder {
    /// Every ordered K-tuple: |M|^K tuples.
    product,
    /// Nondecreasing index tuples (multisets of size K): C(|M|+K-1, K) tuples.
    multiset,
};

inline std::uint64_t tuple_count(std::size_t candidates, std::size_t k, TupleOrder order) {
    return order == TupleOrder::product ? combinatorics::power(candidates, k)
                                        : combinatorics::multichoose(candidates, k);
}

struct TupleSearchResult {
    std::vector<std::size_t> indices;
    double cost = INFINITY;
    std::uint64_t evaluated = 0;

    MeanSet means(std::span<const Point> candidates) const {
        std::vector<Point> mu;
        mu.reserve(indices.size());
        for (std::size_t i : indices) mu.push_back(candidates[i]);
        return MeanSet(std::move(mu));
    }
};

namespace detail {

/// (cost, flattened coordinates) order on index tuples.
inline bool tuple_better(double cost_a, std::span<const std::size_t> a, double cost_b,
                         std::span<const std::size_t> b, std::span<const Point> candidates) {
    if (cost_a != cost_b) return cost_a < cost_b;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& pa = candidates[a[k]];
        const auto& pb = candidates[b[k]];
        if (pa != pb) return pa < pb;
    }
    return false;
}

}  // namespace detail

/// Minimizes the induced cost over all K-tuples of `candidates`. The
/// enumeration is split over `threads` workers by the leading index; the
/// min-reduction is a total order, so results do not depend on the split.
inline TupleSearchResult search_tuples(const WeightedPointSet& x, std::span<const Point> candidates,
                                       std::size_t k, int m, TupleOrder order,
                                       std::uint64_t cap = kDefaultEnumerationCap,
                                       std::size_t threads = 1) {
    detail::require(!candidates.empty(), ErrorKind::invalid_input, "candidate set is empty");
    detail::require(k >= 1, ErrorKind::invalid_input, "K must be >= 1");
    const std::uint64_t count = tuple_count(candidates.size(), k, order);
    if (count > cap) {
        detail::fail(ErrorKind::infeasible,
                     "candidate search needs " +
                         (count == combinatorics::kSaturated ? std::string("more than 2^64")
                                                             : std::to_string(count)) +
                         " tuples, above the enumeration cap of " + std::to_string(cap) +
                         "; raise the cap or shrink the candidate set");
    }

    const InverseDistanceTable table(x, candidates, m);
    const std::size_t n_cand = candidates.size();
    const std::size_t workers = std::min(detail::resolve_threads(threads), n_cand);

    auto scan = [&](std::size_t worker) {
        TupleSearchResult best;
        std::vector<std::size_t> tuple(k);
        for (std::size_t lead = worker; lead < n_cand; lead += workers) {
            // Enumerate the tail for this leading index.
            tuple[0] = lead;
            const std::size_t tail_start = order == TupleOrder::product ? 0 : lead;
            for (std::size_t i = 1; i < k; ++i) tuple[i] = tail_start;
            while (true) {
                const double c = table.tuple_cost(tuple);
                ++best.evaluated;
                if (best.indices.empty() ||
                    detail::tuple_better(c, tuple, best.cost, best.indices, candidates)) {
                    best.cost = c;
                    best.indices = tuple;
                }
                // Advance tail positions 1..k-1.
                std::size_t i = k;
                bool advanced = false;
                while (i-- > 1) {
                    if (tuple[i] + 1 < n_cand) {
                        ++tuple[i];
                        for (std::size_t j = i + 1; j < k; ++j) {
                            tuple[j] = order == TupleOrder::product ? 0 : tuple[i];
                        }
                        advanced = true;
                        break;
                    }
                }
                if (!advanced) break;
            }
        }
        return best;
    };

    std::vector<TupleSearchResult> partial(workers);
    if (workers == 1) {
        partial[0] = scan(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] { partial[w] = scan(w); });
        }
        for (auto& t : pool) t.join();
    }

    TupleSearchResult best;
    for (auto& p : partial) {
        best.evaluated += p.evaluated;
        if (p.indices.empty()) continue;
        if (best.indices.empty() ||
            detail::tuple_better(p.cost, p.indices, best.cost, best.indices, candidates)) {
            best.cost = p.cost;
            best.indices = std::move(p.indices);
        }
    }
    return best;
}

}  // namespace fuzzykm
