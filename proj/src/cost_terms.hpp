#pragma once

// Building blocks of the criterion shared by the full evaluation, the
// standalone merge delta and the incremental merge engine.

#include <cstdint>

#include "tricluster/combinatorics.hpp"

namespace tricluster::detail {

inline double lf(std::int64_t n) { return log_factorial(static_cast<std::uint64_t>(n)); }

/// ln((x+y)!) - ln(x!) - ln(y!); zero when either side is empty.
inline double pair_gain(std::int64_t x, std::int64_t y) {
  if (x == 0 || y == 0) return 0.0;
  return lf(x + y) - lf(x) - lf(y);
}

/// Degree-list prior of one vertex cluster: ln C(marginal + size - 1, size - 1).
inline double degree_list_term(std::int64_t marginal, std::int64_t size) {
  return log_binomial(marginal + size - 1, size - 1);
}

/// Cell-assignment prior: ln C(m + K - 1, K - 1) with K triclusters.
inline double assignment_term(std::int64_t m, std::int64_t triclusters) {
  return log_binomial(m + triclusters - 1, triclusters - 1);
}

/// Change of the global terms when a vertex axis goes from k to k-1 clusters.
/// `others` is the product of the other two axis counts.
inline double vertex_global_delta(std::int64_t universe, std::int64_t k, std::int64_t others, std::int64_t m) {
  return log_sum_stirling(universe, k - 1) - log_sum_stirling(universe, k) +
         assignment_term(m, (k - 1) * others) - assignment_term(m, k * others);
}

inline double time_global_delta(std::int64_t k, std::int64_t others, std::int64_t m) {
  return assignment_term(m, (k - 1) * others) - assignment_term(m, k * others);
}

/// Local part of a vertex-cluster merge, excluding the cell interaction sum.
inline double vertex_local_base(std::int64_t marginal_a, std::int64_t size_a, std::int64_t marginal_b,
                                std::int64_t size_b) {
  return degree_list_term(marginal_a + marginal_b, size_a + size_b) - degree_list_term(marginal_a, size_a) -
         degree_list_term(marginal_b, size_b) + pair_gain(marginal_a, marginal_b);
}

}  // namespace tricluster::detail
