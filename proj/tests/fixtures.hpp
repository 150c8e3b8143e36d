#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tricluster/edge_list.hpp"
#include "tricluster/random.hpp"
#include "tricluster/triclustering.hpp"

namespace fixtures {

// The 6-source / 8-destination / 50-edge example with three time intervals.
// mu[l][i][j], cluster labels 0-based.
inline constexpr int kWorkedMu[3][3][2] = {
    {{5, 1}, {2, 0}, {4, 0}},
    {{2, 2}, {2, 5}, {5, 5}},
    {{0, 0}, {1, 0}, {1, 15}},
};
inline const std::vector<std::uint32_t> kWorkedSourcePartition{0, 0, 0, 1, 1, 2};
inline const std::vector<std::uint32_t> kWorkedDestinationPartition{0, 0, 0, 0, 0, 1, 1, 1};
inline const std::vector<std::int64_t> kWorkedOutDegrees{3, 6, 1, 2, 8, 30};
inline const std::vector<std::int64_t> kWorkedInDegrees{3, 6, 2, 6, 5, 13, 8, 7};
inline const std::vector<std::uint32_t> kWorkedBoundaries{0, 12, 33, 50};

inline std::vector<std::string> worked_source_ids() { return {"1", "2", "3", "4", "5", "6"}; }
inline std::vector<std::string> worked_destination_ids() { return {"a", "b", "c", "d", "e", "f", "g", "h"}; }

// Edges generated tricluster by tricluster in lexicographic (i, j, l) order;
// vertices and ranks are handed out in increasing order inside each cluster.
inline tricluster::TemporalEdgeList worked_edges() {
  std::vector<std::uint32_t> src, dst, ranks;
  std::vector<std::int64_t> out_left = kWorkedOutDegrees, in_left = kWorkedInDegrees;
  std::vector<std::uint32_t> next_rank{1, 13, 34};
  auto take = [](std::vector<std::int64_t>& left, const std::vector<std::uint32_t>& part, std::uint32_t c) {
    for (std::uint32_t v = 0; v < part.size(); ++v) {
      if (part[v] == c && left[v] > 0) {
        --left[v];
        return v;
      }
    }
    throw std::logic_error("degrees exhausted");
  };
  for (std::uint32_t i = 0; i < 3; ++i) {
    for (std::uint32_t j = 0; j < 2; ++j) {
      for (std::uint32_t l = 0; l < 3; ++l) {
        for (int n = 0; n < kWorkedMu[l][i][j]; ++n) {
          src.push_back(take(out_left, kWorkedSourcePartition, i));
          dst.push_back(take(in_left, kWorkedDestinationPartition, j));
          ranks.push_back(next_rank[l]++);
        }
      }
    }
  }
  return tricluster::TemporalEdgeList::from_indices(worked_source_ids(), worked_destination_ids(), std::move(src),
                                                    std::move(dst), {}, std::move(ranks), true);
}

inline tricluster::Triclustering worked_model() {
  tricluster::TriclusteringParts parts;
  parts.source_partition = kWorkedSourcePartition;
  parts.destination_partition = kWorkedDestinationPartition;
  parts.time_boundaries = kWorkedBoundaries;
  for (std::uint32_t l = 0; l < 3; ++l) {
    for (std::uint32_t i = 0; i < 3; ++i) {
      for (std::uint32_t j = 0; j < 2; ++j) parts.cells.push_back({i, j, l, kWorkedMu[l][i][j]});
    }
  }
  parts.out_degrees = kWorkedOutDegrees;
  parts.in_degrees = kWorkedInDegrees;
  parts.source_ids = std::make_shared<const std::vector<std::string>>(worked_source_ids());
  parts.destination_ids = std::make_shared<const std::vector<std::string>>(worked_destination_ids());
  return tricluster::Triclustering(std::move(parts));
}

// Uniform random edges over at most ns x nd vertices (isolated ones dropped).
inline tricluster::TemporalEdgeList random_edges(tricluster::Rng& rng, std::uint32_t ns, std::uint32_t nd,
                                                 std::uint32_t m) {
  std::vector<std::uint32_t> src(m), dst(m);
  std::vector<double> t(m);
  for (std::uint32_t e = 0; e < m; ++e) {
    src[e] = static_cast<std::uint32_t>(tricluster::uniform_below(rng, ns));
    dst[e] = static_cast<std::uint32_t>(tricluster::uniform_below(rng, nd));
    t[e] = tricluster::uniform_unit(rng);
  }
  std::vector<std::string> sids, dids;
  for (std::uint32_t v = 0; v < ns; ++v) sids.push_back("s" + std::to_string(v));
  for (std::uint32_t v = 0; v < nd; ++v) dids.push_back("d" + std::to_string(v));
  return tricluster::TemporalEdgeList::from_indices(sids, dids, std::move(src), std::move(dst), std::move(t));
}

// Random labelling of n vertices into at most k dense clusters.
inline std::vector<std::uint32_t> random_partition(tricluster::Rng& rng, std::size_t n, std::uint32_t k) {
  std::vector<std::uint32_t> raw(n);
  for (auto& c : raw) c = static_cast<std::uint32_t>(tricluster::uniform_below(rng, k));
  std::vector<std::int64_t> remap(k, -1);
  std::uint32_t next = 0;
  for (auto& c : raw) {
    if (remap[c] < 0) remap[c] = next++;
    c = static_cast<std::uint32_t>(remap[c]);
  }
  return raw;
}

inline std::vector<std::uint32_t> random_boundaries(tricluster::Rng& rng, std::uint32_t m, std::uint32_t kt) {
  std::vector<std::uint32_t> cuts;
  for (std::uint32_t r = 1; r < m; ++r) cuts.push_back(r);
  tricluster::shuffle_range(cuts.begin(), cuts.end(), rng);
  cuts.resize(std::min<std::size_t>(cuts.size(), kt - 1));
  cuts.push_back(0);
  cuts.push_back(m);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

struct Instance {
  tricluster::TemporalEdgeList edges;
  tricluster::Triclustering model;
};

// Random data with random partitions: at most 8+8 vertices and 64 edges.
inline Instance random_instance(std::uint64_t seed) {
  tricluster::Rng rng(seed);
  const auto ns = 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 8));
  const auto nd = 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 8));
  const auto m = 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 64));
  auto edges = random_edges(rng, ns, nd, m);
  const auto sp = random_partition(rng, edges.num_sources(), 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 4)));
  const auto dp = random_partition(rng, edges.num_destinations(), 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 4)));
  const auto b = random_boundaries(rng, m, 1 + static_cast<std::uint32_t>(tricluster::uniform_below(rng, 5)));
  auto model = tricluster::compute_counts(edges, sp, dp, b);
  return {std::move(edges), std::move(model)};
}

}  // namespace fixtures
