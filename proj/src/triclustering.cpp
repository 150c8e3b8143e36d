#include "tricluster/triclustering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "tricluster/errors.hpp"

namespace tricluster {

const char* axis_name(Axis axis) noexcept {
  switch (axis) {
    case Axis::Source: return "source";
    case Axis::Destination: return "destination";
    case Axis::Time: return "time";
  }
  return "?";
}

Axis parse_axis(const std::string& name) {
  if (name == "source") return Axis::Source;
  if (name == "destination") return Axis::Destination;
  if (name == "time") return Axis::Time;
  throw std::invalid_argument("unknown axis '" + name + "'");
}

namespace {

// Cluster sizes for a dense labelling; every label must be used.
std::vector<std::int64_t> cluster_sizes(std::span<const std::uint32_t> partition, const char* what) {
  std::uint32_t k = 0;
  for (auto c : partition) k = std::max(k, c + 1);
  std::vector<std::int64_t> sizes(k, 0);
  for (auto c : partition) ++sizes[c];
  for (std::uint32_t c = 0; c < k; ++c) {
    if (sizes[c] == 0) {
      throw InvariantError(std::string(what) + " cluster " + std::to_string(c) + " is empty");
    }
  }
  return sizes;
}

void check_boundaries(std::span<const std::uint32_t> b, std::int64_t m) {
  if (b.size() < 2 || b.front() != 0 || static_cast<std::int64_t>(b.back()) != m) {
    throw InvariantError("time boundaries must start at 0 and end at m");
  }
  for (std::size_t l = 1; l < b.size(); ++l) {
    if (b[l] <= b[l - 1]) throw InvariantError("time boundaries must be strictly increasing");
  }
}

}  // namespace

Triclustering::Triclustering(TriclusteringParts parts)
    : source_partition_(std::move(parts.source_partition)),
      destination_partition_(std::move(parts.destination_partition)),
      time_boundaries_(std::move(parts.time_boundaries)),
      cells_(std::move(parts.cells)),
      out_degrees_(std::move(parts.out_degrees)),
      in_degrees_(std::move(parts.in_degrees)),
      source_ids_(std::move(parts.source_ids)),
      destination_ids_(std::move(parts.destination_ids)),
      times_(std::move(parts.times_by_rank)) {
  if (source_partition_.empty() || destination_partition_.empty()) {
    throw InvariantError("partitions must cover at least one vertex");
  }
  if (out_degrees_.size() != source_partition_.size() ||
      in_degrees_.size() != destination_partition_.size()) {
    throw InvariantError("degree lists must have one entry per vertex");
  }
  if (!source_ids_ || source_ids_->size() != source_partition_.size() || !destination_ids_ ||
      destination_ids_->size() != destination_partition_.size()) {
    throw InvariantError("id tables must have one entry per vertex");
  }
  source_sizes_ = cluster_sizes(source_partition_, "source");
  destination_sizes_ = cluster_sizes(destination_partition_, "destination");
  if (time_boundaries_.empty()) throw InvariantError("time boundaries are empty");
  m_ = time_boundaries_.back();
  check_boundaries(time_boundaries_, m_);
  if (times_ && !times_->empty() && static_cast<std::int64_t>(times_->size()) != m_) {
    throw InvariantError("raw time table does not have m entries");
  }

  const auto ks = source_sizes_.size();
  const auto kd = destination_sizes_.size();
  const auto kt = time_boundaries_.size() - 1;

  // Sort, merge duplicates, drop zeros.
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.i, a.j, a.l) < std::tie(b.i, b.j, b.l);
  });
  std::vector<Cell> merged;
  merged.reserve(cells_.size());
  for (const auto& c : cells_) {
    if (c.i >= ks || c.j >= kd || c.l >= kt) throw InvariantError("cell index out of range");
    if (c.count < 0) throw InvariantError("negative cell count");
    if (!merged.empty() && merged.back().i == c.i && merged.back().j == c.j && merged.back().l == c.l) {
      merged.back().count += c.count;
    } else {
      merged.push_back(c);
    }
  }
  std::erase_if(merged, [](const Cell& c) { return c.count == 0; });
  cells_ = std::move(merged);

  source_marginals_.assign(ks, 0);
  destination_marginals_.assign(kd, 0);
  time_marginals_.assign(kt, 0);
  std::int64_t total = 0;
  for (const auto& c : cells_) {
    source_marginals_[c.i] += c.count;
    destination_marginals_[c.j] += c.count;
    time_marginals_[c.l] += c.count;
    total += c.count;
  }
  if (total != m_) throw InvariantError("cell counts do not sum to m");
  for (std::size_t l = 0; l < kt; ++l) {
    if (time_marginals_[l] != static_cast<std::int64_t>(time_boundaries_[l + 1] - time_boundaries_[l])) {
      throw InvariantError("time marginal " + std::to_string(l) + " differs from its interval length");
    }
  }
  std::vector<std::int64_t> deg_sum(ks, 0);
  for (std::size_t s = 0; s < source_partition_.size(); ++s) {
    if (out_degrees_[s] < 0) throw InvariantError("negative out-degree");
    deg_sum[source_partition_[s]] += out_degrees_[s];
  }
  if (deg_sum != source_marginals_) throw InvariantError("out-degrees disagree with source marginals");
  std::vector<std::int64_t> in_sum(kd, 0);
  for (std::size_t d = 0; d < destination_partition_.size(); ++d) {
    if (in_degrees_[d] < 0) throw InvariantError("negative in-degree");
    in_sum[destination_partition_[d]] += in_degrees_[d];
  }
  if (in_sum != destination_marginals_) {
    throw InvariantError("in-degrees disagree with destination marginals");
  }
}

std::uint32_t Triclustering::k(Axis axis) const noexcept {
  switch (axis) {
    case Axis::Source: return k_sources();
    case Axis::Destination: return k_destinations();
    case Axis::Time: return k_time();
  }
  return 0;
}

std::span<const std::int64_t> Triclustering::marginals(Axis axis) const noexcept {
  switch (axis) {
    case Axis::Source: return source_marginals_;
    case Axis::Destination: return destination_marginals_;
    case Axis::Time: return time_marginals_;
  }
  return {};
}

std::int64_t Triclustering::count(std::uint32_t i, std::uint32_t j, std::uint32_t l) const {
  Cell key{i, j, l, 0};
  auto it = std::lower_bound(cells_.begin(), cells_.end(), key, [](const Cell& a, const Cell& b) {
    return std::tie(a.i, a.j, a.l) < std::tie(b.i, b.j, b.l);
  });
  if (it != cells_.end() && it->i == i && it->j == j && it->l == l) return it->count;
  return 0;
}

std::uint32_t Triclustering::interval_of_rank(std::uint32_t rank) const {
  if (rank < 1 || rank > m_) throw std::out_of_range("rank outside 1..m");
  auto it = std::lower_bound(time_boundaries_.begin() + 1, time_boundaries_.end(), rank);
  return static_cast<std::uint32_t>(it - time_boundaries_.begin() - 1);
}

std::vector<double> Triclustering::time_cut_values() const {
  if (!times_ || times_->empty()) return {};
  const auto& t = *times_;
  std::vector<double> cuts;
  cuts.reserve(time_boundaries_.size());
  for (auto b : time_boundaries_) {
    if (b == 0) {
      cuts.push_back(t.front());
    } else if (static_cast<std::int64_t>(b) == m_) {
      cuts.push_back(t.back());
    } else {
      cuts.push_back(0.5 * (t[b - 1] + t[b]));
    }
  }
  return cuts;
}

namespace {
std::vector<std::vector<std::uint32_t>> members_of(std::span<const std::uint32_t> partition, std::size_t k) {
  std::vector<std::vector<std::uint32_t>> out(k);
  for (std::size_t v = 0; v < partition.size(); ++v) out[partition[v]].push_back(static_cast<std::uint32_t>(v));
  return out;
}
}  // namespace

std::vector<std::vector<std::uint32_t>> Triclustering::source_members() const {
  return members_of(source_partition_, k_sources());
}

std::vector<std::vector<std::uint32_t>> Triclustering::destination_members() const {
  return members_of(destination_partition_, k_destinations());
}

TriclusteringParts Triclustering::to_parts() const {
  return TriclusteringParts{source_partition_, destination_partition_, time_boundaries_, cells_,
                            out_degrees_,      in_degrees_,           source_ids_,      destination_ids_,
                            times_};
}

std::vector<std::uint32_t> time_partition_from_marginals(std::span<const std::int64_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("time_partition_from_marginals: no intervals");
  std::vector<std::uint32_t> b{0};
  std::int64_t acc = 0;
  for (auto s : sizes) {
    if (s <= 0) throw std::invalid_argument("time_partition_from_marginals: non-positive interval size");
    acc += s;
    if (acc > UINT32_MAX) throw std::invalid_argument("time_partition_from_marginals: m too large");
    b.push_back(static_cast<std::uint32_t>(acc));
  }
  return b;
}

Triclustering compute_counts(const TemporalEdgeList& edges,
                             std::span<const std::uint32_t> source_partition,
                             std::span<const std::uint32_t> destination_partition,
                             std::span<const std::uint32_t> time_boundaries) {
  if (source_partition.size() != edges.num_sources()) {
    throw CoverageError("source partition covers " + std::to_string(source_partition.size()) +
                        " vertices, data has " + std::to_string(edges.num_sources()));
  }
  if (destination_partition.size() != edges.num_destinations()) {
    throw CoverageError("destination partition covers " + std::to_string(destination_partition.size()) +
                        " vertices, data has " + std::to_string(edges.num_destinations()));
  }
  const auto m = static_cast<std::int64_t>(edges.num_edges());
  check_boundaries(time_boundaries, m);

  // Interval of each rank.
  std::vector<std::uint32_t> interval(m + 1, 0);
  for (std::size_t l = 0; l + 1 < time_boundaries.size(); ++l) {
    for (auto r = time_boundaries[l] + 1; r <= time_boundaries[l + 1]; ++r) {
      interval[r] = static_cast<std::uint32_t>(l);
    }
  }

  auto src = edges.sources();
  auto dst = edges.destinations();
  auto rnk = edges.time_ranks();
  std::vector<Cell> cells;
  cells.reserve(edges.num_edges());
  for (std::size_t n = 0; n < edges.num_edges(); ++n) {
    cells.push_back(Cell{source_partition[src[n]], destination_partition[dst[n]], interval[rnk[n]], 1});
  }

  TriclusteringParts parts;
  parts.source_partition.assign(source_partition.begin(), source_partition.end());
  parts.destination_partition.assign(destination_partition.begin(), destination_partition.end());
  parts.time_boundaries.assign(time_boundaries.begin(), time_boundaries.end());
  parts.cells = std::move(cells);
  parts.out_degrees = edges.out_degrees();
  parts.in_degrees = edges.in_degrees();
  parts.source_ids = edges.source_id_table();
  parts.destination_ids = edges.destination_id_table();
  parts.times_by_rank = edges.times_by_rank();
  return Triclustering(std::move(parts));
}

Triclustering null_model(const TemporalEdgeList& edges) {
  std::vector<std::uint32_t> s(edges.num_sources(), 0);
  std::vector<std::uint32_t> d(edges.num_destinations(), 0);
  std::vector<std::uint32_t> b{0, static_cast<std::uint32_t>(edges.num_edges())};
  return compute_counts(edges, s, d, b);
}

std::string compatibility_issue(const TemporalEdgeList& edges, const Triclustering& model) {
  if (static_cast<std::int64_t>(edges.num_edges()) != model.num_edges()) {
    return "edge count differs: data has " + std::to_string(edges.num_edges()) + ", model has " +
           std::to_string(model.num_edges());
  }
  if (edges.num_sources() != model.num_sources() || edges.num_destinations() != model.num_destinations()) {
    return "vertex sets differ in size";
  }
  if (edges.source_ids() != model.source_ids() || edges.destination_ids() != model.destination_ids()) {
    return "vertex ids differ";
  }
  auto out = edges.out_degrees();
  if (!std::equal(out.begin(), out.end(), model.out_degrees().begin())) return "out-degrees differ";
  auto in = edges.in_degrees();
  if (!std::equal(in.begin(), in.end(), model.in_degrees().begin())) return "in-degrees differ";
  auto recount = compute_counts(edges, model.source_partition(), model.destination_partition(),
                                model.time_boundaries());
  if (!std::ranges::equal(recount.cells(), model.cells())) return "tricluster counts differ";
  return {};
}

Triclustering aggregate(const Triclustering& model, std::span<const std::uint32_t> source_map,
                        std::span<const std::uint32_t> destination_map,
                        std::span<const std::uint32_t> time_map) {
  if (source_map.size() != model.k_sources() || destination_map.size() != model.k_destinations() ||
      time_map.size() != model.k_time()) {
    throw std::invalid_argument("aggregate: cluster maps do not match the model");
  }
  if (time_map.front() != 0) throw OrderingError("aggregate: time map must start at 0");
  for (std::size_t l = 1; l < time_map.size(); ++l) {
    if (time_map[l] != time_map[l - 1] && time_map[l] != time_map[l - 1] + 1) {
      throw OrderingError("aggregate: time map must be contiguous and non-decreasing");
    }
  }
  auto parts = model.to_parts();
  for (auto& c : parts.source_partition) c = source_map[c];
  for (auto& c : parts.destination_partition) c = destination_map[c];
  std::vector<std::uint32_t> b{0};
  auto old_b = model.time_boundaries();
  for (std::size_t l = 0; l < time_map.size(); ++l) {
    if (l + 1 == time_map.size() || time_map[l + 1] != time_map[l]) b.push_back(old_b[l + 1]);
  }
  parts.time_boundaries = std::move(b);
  for (auto& c : parts.cells) {
    c.i = source_map[c.i];
    c.j = destination_map[c.j];
    c.l = time_map[c.l];
  }
  return Triclustering(std::move(parts));
}

Triclustering merge_clusters(const Triclustering& model, Axis axis, std::uint32_t a, std::uint32_t b) {
  const auto k = model.k(axis);
  if (a == b || a >= k || b >= k) throw std::invalid_argument("merge_clusters: invalid cluster pair");
  if (a > b) std::swap(a, b);
  if (axis == Axis::Time && b != a + 1) throw OrderingError("time merges require adjacent intervals");
  auto collapse = [&](std::uint32_t count, bool active) {
    std::vector<std::uint32_t> map(count);
    for (std::uint32_t c = 0; c < count; ++c) {
      map[c] = !active ? c : (c == b ? a : (c > b ? c - 1 : c));
    }
    return map;
  };
  return aggregate(model, collapse(model.k_sources(), axis == Axis::Source),
                   collapse(model.k_destinations(), axis == Axis::Destination),
                   collapse(model.k_time(), axis == Axis::Time));
}

}  // namespace tricluster

namespace tricluster {

namespace {

std::vector<std::uint32_t> vertex_map(std::span<const std::uint32_t> partition,
                                      std::span<const std::uint32_t> rep) {
  // First vertex seen for each representative decides the new label.
  std::vector<std::uint32_t> label_of_rep(rep.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto c : partition) {
    auto r = rep[c];
    if (label_of_rep[r] == UINT32_MAX) label_of_rep[r] = next++;
  }
  std::vector<std::uint32_t> map(rep.size());
  for (std::size_t c = 0; c < rep.size(); ++c) map[c] = label_of_rep[rep[c]];
  return map;
}

}  // namespace

Triclustering collapse_clusters(const Triclustering& model, std::span<const std::uint32_t> source_rep,
                                std::span<const std::uint32_t> destination_rep,
                                std::span<const std::uint32_t> time_rep) {
  auto smap = vertex_map(model.source_partition(), source_rep);
  auto dmap = vertex_map(model.destination_partition(), destination_rep);
  std::vector<std::uint32_t> tmap(time_rep.size(), 0);
  for (std::size_t l = 1; l < time_rep.size(); ++l) {
    tmap[l] = tmap[l - 1] + (time_rep[l] != time_rep[l - 1] ? 1 : 0);
  }
  return aggregate(model, smap, dmap, tmap);
}

Triclustering canonical(const Triclustering& model) {
  std::vector<std::uint32_t> s(model.k_sources()), d(model.k_destinations()), t(model.k_time());
  std::iota(s.begin(), s.end(), 0u);
  std::iota(d.begin(), d.end(), 0u);
  std::iota(t.begin(), t.end(), 0u);
  return collapse_clusters(model, s, d, t);
}

}  // namespace tricluster
