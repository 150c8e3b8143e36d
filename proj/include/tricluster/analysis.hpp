#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tricluster/triclustering.hpp"

namespace tricluster {

struct JointCell {
  std::uint32_t i = 0, j = 0, l = 0;
  double p = 0.0;
};

/// Empirical distributions of a triclustering's clusters.
struct ClusterDistributions {
  std::vector<double> source;       // sigma_i / m
  std::vector<double> destination;  // delta_j / m
  std::vector<double> time;         // tau_l / m
  std::vector<double> source_destination;  // k_S x k_D row-major, sum_l mu_ijl / m
  std::vector<JointCell> joint;            // non-zero mu_ijl / m, cell order
  std::uint32_t k_sources = 0, k_destinations = 0, k_time = 0;

  double pair(std::uint32_t i, std::uint32_t j) const { return source_destination[std::size_t(i) * k_destinations + j]; }
};

ClusterDistributions cluster_distributions(const Triclustering& model);

struct PairContributions {
  std::uint32_t k_sources = 0, k_destinations = 0;
  std::vector<double> values;  // row-major
  double total = 0.0;
  double at(std::uint32_t i, std::uint32_t j) const { return values[std::size_t(i) * k_destinations + j]; }
};

struct TimeContribution {
  std::uint32_t i = 0, j = 0, l = 0;
  double value = 0.0;
};

/// Cells with mu_ijl = 0 contribute 0 and are not listed.
struct PairTimeContributions {
  std::vector<TimeContribution> values;
  double total = 0.0;
  double at(std::uint32_t i, std::uint32_t j, std::uint32_t l) const;
};

/// Per-pair terms P(i,j) ln(P(i,j) / (P(i) P(j))) of the source/destination
/// cluster mutual information, in nats.
PairContributions mi_source_dest(const Triclustering& model);

/// Terms P(i,j,l) ln(P(i,j,l) / (P(i,j) P(l))) between cluster pairs and segments.
PairTimeContributions mi_pair_time(const Triclustering& model);

/// Generalized Jensen-Shannon divergence with weights alpha_p + alpha_q = 1.
double js_divergence(std::span<const double> p, std::span<const double> q, double alpha_p, double alpha_q);

/// Profile of cluster c on `axis`: its cells over the other two axes, divided
/// by its marginal. Dense, indexed like the remaining axes in order.
std::vector<double> cluster_profile(const Triclustering& model, Axis axis, std::uint32_t c);

struct DissimilarityCheck {
  double empirical = 0.0;  // delta / m
  double limit = 0.0;      // (pi_a + pi_b) JS(alpha_a, alpha_b)
  double alpha_a = 0.0, alpha_b = 0.0;
  double relative_gap() const;
};

/// Compares the merge dissimilarity of clusters a and b with its large-m limit.
/// Time clusters must be adjacent.
DissimilarityCheck asymptotic_dissimilarity_check(const Triclustering& model, Axis axis, std::uint32_t a,
                                                  std::uint32_t b);

/// "source_cluster<d>destination_cluster<d>contribution<d>sign" rows.
void write_pair_contributions(std::ostream& out, const PairContributions& c, bool bits = false,
                              char delimiter = '\t');
/// Same with a time_cluster column.
void write_pair_time_contributions(std::ostream& out, const PairTimeContributions& c, bool bits = false,
                                   char delimiter = '\t');

}  // namespace tricluster
