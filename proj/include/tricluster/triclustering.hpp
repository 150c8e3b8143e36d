#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tricluster/edge_list.hpp"

namespace tricluster {

enum class Axis : std::uint8_t { Source = 0, Destination = 1, Time = 2 };

const char* axis_name(Axis axis) noexcept;
Axis parse_axis(const std::string& name);

/// One non-empty tricluster of the count cube.
struct Cell {
  std::uint32_t i = 0;  // source cluster
  std::uint32_t j = 0;  // destination cluster
  std::uint32_t l = 0;  // time interval
  std::int64_t count = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Raw material for a Triclustering. Cluster indices are 0-based and dense.
struct TriclusteringParts {
  std::vector<std::uint32_t> source_partition;       // per source vertex
  std::vector<std::uint32_t> destination_partition;  // per destination vertex
  std::vector<std::uint32_t> time_boundaries;        // 0 = b_0 < b_1 < ... < b_kT = m
  std::vector<Cell> cells;                           // any order, zero counts allowed
  std::vector<std::int64_t> out_degrees;
  std::vector<std::int64_t> in_degrees;
  IdTable source_ids;
  IdTable destination_ids;
  std::shared_ptr<const std::vector<double>> times_by_rank;  // optional
};

/// A triclustering state: three partitions and the sparse count cube with its
/// marginals and vertex degrees. Time interval l covers ranks
/// (time_boundaries[l], time_boundaries[l+1]]. Immutable; construction
/// validates every structural invariant and throws InvariantError otherwise.
class Triclustering {
 public:
  explicit Triclustering(TriclusteringParts parts);

  std::int64_t num_edges() const noexcept { return m_; }
  std::size_t num_sources() const noexcept { return source_partition_.size(); }
  std::size_t num_destinations() const noexcept { return destination_partition_.size(); }

  std::uint32_t k_sources() const noexcept { return static_cast<std::uint32_t>(source_marginals_.size()); }
  std::uint32_t k_destinations() const noexcept {
    return static_cast<std::uint32_t>(destination_marginals_.size());
  }
  std::uint32_t k_time() const noexcept { return static_cast<std::uint32_t>(time_marginals_.size()); }
  std::uint32_t k(Axis axis) const noexcept;

  std::span<const std::uint32_t> source_partition() const noexcept { return source_partition_; }
  std::span<const std::uint32_t> destination_partition() const noexcept { return destination_partition_; }
  std::span<const std::uint32_t> time_boundaries() const noexcept { return time_boundaries_; }

  /// Non-empty cells sorted by (i, j, l).
  std::span<const Cell> cells() const noexcept { return cells_; }
  std::int64_t count(std::uint32_t i, std::uint32_t j, std::uint32_t l) const;

  std::span<const std::int64_t> source_marginals() const noexcept { return source_marginals_; }
  std::span<const std::int64_t> destination_marginals() const noexcept { return destination_marginals_; }
  std::span<const std::int64_t> time_marginals() const noexcept { return time_marginals_; }
  std::span<const std::int64_t> marginals(Axis axis) const noexcept;

  std::span<const std::int64_t> out_degrees() const noexcept { return out_degrees_; }
  std::span<const std::int64_t> in_degrees() const noexcept { return in_degrees_; }

  /// Number of vertices per cluster.
  std::span<const std::int64_t> source_cluster_sizes() const noexcept { return source_sizes_; }
  std::span<const std::int64_t> destination_cluster_sizes() const noexcept { return destination_sizes_; }

  const std::vector<std::string>& source_ids() const noexcept { return *source_ids_; }
  const std::vector<std::string>& destination_ids() const noexcept { return *destination_ids_; }
  const IdTable& source_id_table() const noexcept { return source_ids_; }
  const IdTable& destination_id_table() const noexcept { return destination_ids_; }
  const std::shared_ptr<const std::vector<double>>& times_by_rank() const noexcept { return times_; }

  /// Interval index containing `rank` (1..m).
  std::uint32_t interval_of_rank(std::uint32_t rank) const;

  /// Original-timestamp cut values, one per boundary: midpoints between the
  /// raw stamps adjacent to each inner boundary, first and last stamp at the
  /// ends. Empty when no raw times are attached.
  std::vector<double> time_cut_values() const;

  /// Vertices of each cluster, ascending.
  std::vector<std::vector<std::uint32_t>> source_members() const;
  std::vector<std::vector<std::uint32_t>> destination_members() const;

  TriclusteringParts to_parts() const;

 private:
  std::int64_t m_ = 0;
  std::vector<std::uint32_t> source_partition_;
  std::vector<std::uint32_t> destination_partition_;
  std::vector<std::uint32_t> time_boundaries_;
  std::vector<Cell> cells_;
  std::vector<std::int64_t> source_marginals_;
  std::vector<std::int64_t> destination_marginals_;
  std::vector<std::int64_t> time_marginals_;
  std::vector<std::int64_t> out_degrees_;
  std::vector<std::int64_t> in_degrees_;
  std::vector<std::int64_t> source_sizes_;
  std::vector<std::int64_t> destination_sizes_;
  IdTable source_ids_;
  IdTable destination_ids_;
  std::shared_ptr<const std::vector<double>> times_;
};

/// Unique ordered interval partition with the given sizes, as boundaries
/// 0, τ1, τ1+τ2, ..., m. Throws std::invalid_argument on a non-positive size.
std::vector<std::uint32_t> time_partition_from_marginals(std::span<const std::int64_t> sizes);

/// Counts edges per tricluster for the given partitions. Partitions must have
/// one entry per vertex with dense cluster labels; boundaries must tile 1..m.
/// Throws CoverageError when a partition does not cover its vertex set.
Triclustering compute_counts(const TemporalEdgeList& edges,
                             std::span<const std::uint32_t> source_partition,
                             std::span<const std::uint32_t> destination_partition,
                             std::span<const std::uint32_t> time_boundaries);

/// The 1x1x1 model.
Triclustering null_model(const TemporalEdgeList& edges);

/// Checks the four compatibility conditions between data and model.
/// Returns an empty string when compatible, a reason otherwise.
std::string compatibility_issue(const TemporalEdgeList& edges, const Triclustering& model);
inline bool is_compatible(const TemporalEdgeList& edges, const Triclustering& model) {
  return compatibility_issue(edges, model).empty();
}

/// Relabels clusters through per-axis maps (old cluster -> new cluster, new
/// labels dense). The time map must be non-decreasing and contiguous.
Triclustering aggregate(const Triclustering& model, std::span<const std::uint32_t> source_map,
                        std::span<const std::uint32_t> destination_map,
                        std::span<const std::uint32_t> time_map);

/// Merges clusters a and b of one axis. The merged cluster takes the smaller
/// label and higher labels shift down by one. Time merges require |a-b| = 1.
Triclustering merge_clusters(const Triclustering& model, Axis axis, std::uint32_t a, std::uint32_t b);

}  // namespace tricluster

namespace tricluster {

/// Collapses clusters that share a representative label. Vertex clusters of
/// the result are ordered by smallest member vertex, time intervals by
/// position; time representatives must form contiguous runs.
Triclustering collapse_clusters(const Triclustering& model, std::span<const std::uint32_t> source_rep,
                                std::span<const std::uint32_t> destination_rep,
                                std::span<const std::uint32_t> time_rep);

/// Same model with vertex clusters relabelled by smallest member vertex.
Triclustering canonical(const Triclustering& model);

}  // namespace tricluster
