#pragma once

#include <cstdint>
#include <vector>

#include "tricluster/edge_list.hpp"
#include "tricluster/triclustering.hpp"

// Reference implementations that share no code with the library's criterion.
namespace oracle {

/// ln(n!) from the exact big integer.
double log_factorial(std::uint64_t n);
/// ln C(n, k) from the exact big integer.
double log_binomial(std::uint64_t n, std::uint64_t k);
/// ln of sum_{j<=k} S(n, j), Stirling numbers from the exact integer recurrence.
double log_bell_prefix(std::uint64_t n, std::uint64_t k);
/// Exact Bell number B(n) as a decimal string.
std::string bell_number(unsigned n);

/// The criterion recomputed term by term from the raw edges and the three
/// partitions (cluster labels 0-based, boundaries 0 = b_0 < ... < b_kT = m).
double cost(const tricluster::TemporalEdgeList& edges, const std::vector<std::uint32_t>& source_partition,
            const std::vector<std::uint32_t>& destination_partition, const std::vector<std::uint32_t>& boundaries);

/// Same, reading the partitions off a model fitted to `edges`.
double cost(const tricluster::TemporalEdgeList& edges, const tricluster::Triclustering& model);

/// All set partitions of {0..n-1} as restricted growth strings.
std::vector<std::vector<std::uint32_t>> set_partitions(std::uint32_t n);

struct Optimum {
  double cost = 0.0;
  std::vector<std::uint32_t> source_partition, destination_partition, boundaries;
};

/// Global minimum of the criterion over every pair of vertex partitions and
/// every segmentation of the ranks (dynamic programming over segment ends).
Optimum exhaustive_optimum(const tricluster::TemporalEdgeList& edges);

/// Same minimum, enumerating the 2^(m-1) segmentations literally. Small m only.
Optimum exhaustive_optimum_literal(const tricluster::TemporalEdgeList& edges);

}  // namespace oracle
