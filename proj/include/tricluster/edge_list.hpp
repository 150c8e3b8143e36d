#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tricluster {

using IdTable = std::shared_ptr<const std::vector<std::string>>;

enum class Delimiter { Auto, Comma, Tab };

Delimiter parse_delimiter(const std::string& name);

struct RawEdge {
  std::string source;
  std::string destination;
  double time = 0.0;
};

/// Replaces timestamps by their ranks 1..m. Ties keep input order.
/// Throws std::invalid_argument on an empty sequence or a non-finite value.
std::vector<std::uint32_t> rank_transform(std::span<const double> raw_times);

/// Observed temporal interaction data: m directed edges with time ranks.
///
/// Vertex ids are opaque strings mapped to dense indices in order of first
/// occurrence. Unless a universe is injected, only vertices occurring in at
/// least one edge exist. Immutable after construction.
class TemporalEdgeList {
 public:
  /// Builds from string triples; times are rank-transformed.
  static TemporalEdgeList from_raw(std::span<const RawEdge> edges);

  /// Same as from_raw but with explicit vertex universes. Every edge endpoint
  /// must belong to its universe; universe vertices without edges are kept.
  static TemporalEdgeList from_raw(std::span<const RawEdge> edges,
                                   const std::vector<std::string>& source_universe,
                                   const std::vector<std::string>& destination_universe);

  /// Builds from integer endpoints into the given id tables. Vertices that do
  /// not occur are dropped (ids renumbered, relative order kept) unless
  /// `keep_isolated` is set. `ranks` may be empty, in which case they are
  /// derived from `raw_times`; `raw_times` may be empty when ranks are given.
  static TemporalEdgeList from_indices(const std::vector<std::string>& source_ids,
                                       const std::vector<std::string>& destination_ids,
                                       std::vector<std::uint32_t> sources,
                                       std::vector<std::uint32_t> destinations,
                                       std::vector<double> raw_times,
                                       std::vector<std::uint32_t> ranks = {},
                                       bool keep_isolated = false);

  std::size_t num_edges() const noexcept { return sources_.size(); }
  std::size_t num_sources() const noexcept { return source_ids_->size(); }
  std::size_t num_destinations() const noexcept { return destination_ids_->size(); }

  std::span<const std::uint32_t> sources() const noexcept { return sources_; }
  std::span<const std::uint32_t> destinations() const noexcept { return destinations_; }
  /// Ranks in 1..m, a permutation.
  std::span<const std::uint32_t> time_ranks() const noexcept { return ranks_; }
  /// Original timestamps in edge order; empty when the data carries no raw times.
  std::span<const double> raw_times() const noexcept { return raw_times_; }
  bool has_raw_times() const noexcept { return !raw_times_.empty(); }

  const std::vector<std::string>& source_ids() const noexcept { return *source_ids_; }
  const std::vector<std::string>& destination_ids() const noexcept { return *destination_ids_; }
  const IdTable& source_id_table() const noexcept { return source_ids_; }
  const IdTable& destination_id_table() const noexcept { return destination_ids_; }

  std::vector<std::int64_t> out_degrees() const;
  std::vector<std::int64_t> in_degrees() const;

  /// Edge index holding each rank: result[r-1] is the edge with rank r.
  std::vector<std::uint32_t> edges_by_rank() const;

  /// Raw timestamps sorted by rank (empty without raw times).
  std::shared_ptr<const std::vector<double>> times_by_rank() const;

 private:
  TemporalEdgeList() = default;
  void validate() const;

  IdTable source_ids_;
  IdTable destination_ids_;
  std::vector<std::uint32_t> sources_;
  std::vector<std::uint32_t> destinations_;
  std::vector<std::uint32_t> ranks_;
  std::vector<double> raw_times_;
};

/// Reads "src,dst,time" rows. Lines starting with '#' and blank lines are
/// skipped; a first row whose time field is not numeric is taken as a header.
TemporalEdgeList ingest_edges(std::istream& in, Delimiter delimiter = Delimiter::Auto);

TemporalEdgeList read_edge_file(const std::filesystem::path& path,
                                Delimiter delimiter = Delimiter::Auto);

/// Writes rows "src<d>dst<d>time" in edge order. Uses raw times when present,
/// ranks otherwise. Doubles are written with round-trip precision.
void write_edges(std::ostream& out, const TemporalEdgeList& edges, char delimiter = ',');

}  // namespace tricluster
