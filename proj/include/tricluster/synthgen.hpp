#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tricluster/edge_list.hpp"
#include "tricluster/triclustering.hpp"

namespace tricluster {

enum class GeneratorMode { Temporal, Shuffled, ErdosRenyi };

GeneratorMode parse_generator_mode(const std::string& name);
const char* generator_mode_name(GeneratorMode mode) noexcept;

/// Balanced-cluster temporal graph process on the time interval [0, 1].
struct GeneratorConfig {
  int k = 5;
  std::uint32_t n_sources = 50;
  std::uint32_t n_destinations = 50;
  std::uint64_t m = 1024;
  std::uint64_t seed = 0;
  double noise_fraction = 0.0;
  GeneratorMode mode = GeneratorMode::Temporal;
};

/// k x k row-major connection matrix at time t: diagonal (0.9t + 0.1(1-t))/k,
/// off-diagonal (0.1t + 0.9(1-t))/(k(k-1)); the 1x1 matrix (1) when k = 1.
std::vector<double> theta(double t, int k);

/// Planted cluster of generator vertex `v` among `n` vertices split into k
/// balanced blocks (remainder vertices go to the lowest-index clusters).
std::uint32_t balanced_cluster(std::uint32_t v, std::uint32_t n, int k);

struct GeneratedData {
  TemporalEdgeList edges;
  /// Planted cluster per vertex, aligned with edges.source_ids() / destination_ids().
  std::vector<std::uint32_t> source_truth;
  std::vector<std::uint32_t> destination_truth;
};

/// Draws a dataset: per edge, t ~ U[0,1], a cluster pair from theta(t),
/// endpoints uniform within the clusters. Shuffled mode then permutes the
/// timestamps; ErdosRenyi mode ignores clusters. Noise reallocates a
/// fraction of edges afterwards. Vertex ids are "s<n>" and "d<n>".
GeneratedData generate(const GeneratorConfig& config);

/// Resamples source, destination and timestamp of floor(fraction*m) uniformly
/// chosen edges, each independently and uniformly.
TemporalEdgeList reallocate(const TemporalEdgeList& edges, double fraction, std::uint64_t seed);

/// Uniformly permutes the timestamps over the edges.
TemporalEdgeList shuffle_time(const TemporalEdgeList& edges, std::uint64_t seed);

TemporalEdgeList erdos_renyi_temporal(std::uint32_t n_sources, std::uint32_t n_destinations, std::uint64_t m,
                                      std::uint64_t seed);

/// Draws a dataset compatible with the model: edges are assigned to
/// triclusters, then to vertices under the degree constraints, then ordered
/// uniformly within each interval. Vertex indices match the model's.
TemporalEdgeList sample_from_model(const Triclustering& model, std::uint64_t seed);

/// Adjusted Rand index of two labellings of the same elements.
double recovery_score(std::span<const std::uint32_t> found, std::span<const std::uint32_t> truth);

/// Writes "id<d>cluster" rows.
void write_truth(std::ostream& out, const std::vector<std::string>& ids, std::span<const std::uint32_t> truth,
                 char delimiter = '\t');

}  // namespace tricluster
