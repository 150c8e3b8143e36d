#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tricluster/edge_list.hpp"
#include "tricluster/merge_state.hpp"
#include "tricluster/triclustering.hpp"

namespace tricluster {

/// Search effort knobs. None of them changes the criterion being minimized.
struct SearchConfig {
  int restarts = 1;
  int max_neighborhood_level = 3;
  std::uint64_t seed = 0;
  /// Number of initial time intervals; nullopt means ceil(sqrt(m)).
  std::optional<std::uint32_t> initial_time_granularity;
  std::optional<double> time_budget_seconds;
  /// Perturb the first local optimum independently per restart (in parallel)
  /// instead of chaining perturbations from the incumbent.
  bool parallel_restarts = false;
  /// Thread cap for parallel restarts; 0 reads TRICLUSTER_THREADS, then hardware.
  unsigned threads = 0;
};

/// Merge tolerance: a merge is an improvement when its delta is below -kImprovementEps.
inline constexpr double kImprovementEps = 1e-9;

/// Finest model: one cluster per vertex and min(m, granularity) equal-frequency
/// intervals (granularity nullopt: ceil(sqrt(m))).
Triclustering initial_solution(const TemporalEdgeList& edges,
                               std::optional<std::uint32_t> granularity = std::nullopt);

std::uint32_t auto_granularity(std::size_t m);

struct GreedyStats {
  int merges = 0;
  std::vector<double> accepted_deltas;
};

/// Greedy bottom-up merging: repeatedly applies the cheapest legal merge while
/// it lowers the cost. Deterministic; ties go to the smallest (axis, a, b).
Triclustering greedy_merge(const Triclustering& start, GreedyStats* stats = nullptr);

/// Moves single vertices to other existing clusters while that lowers the
/// cost; never empties a cluster. Returns a fixed point.
Triclustering refine_reassign(const TemporalEdgeList& edges, const Triclustering& model);

struct RestartRecord {
  int index = 0;
  int level = 0;  // neighborhood level used (0 for the initial run)
  double cost = 0.0;
  double best_cost = 0.0;
  int merges = 0;
  double wall_seconds = 0.0;
  std::uint32_t k_sources = 0;
  std::uint32_t k_destinations = 0;
  std::uint32_t k_time = 0;
  bool improved = false;
};

struct SearchReport {
  std::vector<RestartRecord> restarts;
  bool budget_exhausted = false;
  double best_cost = 0.0;
  double null_cost = 0.0;
};

struct FitResult {
  Triclustering model;
  SearchReport report;
};

/// Variable neighborhood search around the greedy heuristic. Restart 0 is
/// greedy_merge(initial_solution). Each further restart splits ceil(2^level)
/// random clusters per axis back to their finest pieces, re-merges greedily,
/// refines vertex assignments and merges again; the level resets to 1 after
/// an improvement and grows otherwise (wrapping past the maximum). Child
/// seeds derive from config.seed and the restart index.
FitResult vns_fit(const TemporalEdgeList& edges, const SearchConfig& config);

/// One row per restart: index, level, cost, best_cost, merges, wall_seconds,
/// k_sources, k_destinations, k_time, improved.
void write_search_report(std::ostream& out, const SearchReport& report, char delimiter = '\t');

}  // namespace tricluster
