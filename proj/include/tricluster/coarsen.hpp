#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tricluster/triclustering.hpp"

namespace tricluster {

/// When to stop coarsening. tau_min = 0 agglomerates to the null model even
/// through models less probable than it. A target of 0 leaves that axis
/// unconstrained: it may still be merged but does not have to reach any count.
struct StopRule {
  double tau_min = 0.0;
  std::array<std::uint32_t, 3> target{0, 0, 0};
};

struct MergeRecord {
  std::size_t step = 0;  // 1-based
  Axis axis = Axis::Source;
  std::uint32_t keep = 0;  // labels refer to the starting model
  std::uint32_t gone = 0;
  double delta = 0.0;
  double cost_after = 0.0;
  double tau_after = 0.0;
  bool baseline_reset = false;
  std::uint32_t k_sources = 0;
  std::uint32_t k_destinations = 0;
  std::uint32_t k_time = 0;
};

class MergeHierarchy {
 public:
  MergeHierarchy(Triclustering start, double start_cost, double null_cost, std::vector<MergeRecord> records);

  const Triclustering& start() const noexcept { return start_; }
  double start_cost() const noexcept { return start_cost_; }
  double null_cost() const noexcept { return null_cost_; }
  const std::vector<MergeRecord>& records() const noexcept { return records_; }
  std::size_t steps() const noexcept { return records_.size(); }

  /// Model after the first `step` merges (0 gives the start model).
  Triclustering replay(std::size_t step) const;
  /// Largest relative gap between recorded and recomputed costs.
  double replay_error() const;

 private:
  Triclustering start_;
  double start_cost_;
  double null_cost_;
  std::vector<MergeRecord> records_;
};

/// Repeatedly applies the cheapest merge over all axes (adjacent intervals
/// only) until the rule is met or the model is 1x1x1. tau is measured against
/// the start model, or against any cheaper model met on the way.
MergeHierarchy agglomerate(const Triclustering& best, const StopRule& stop = {});

struct PosteriorRatio {
  double ratio = 1.0;  // exp(delta); +inf when it does not fit a double
  double log_ratio = 0.0;
  bool overflow = false;
};

/// P(M|E) / P(M merged|E) for a merge of dissimilarity delta.
PosteriorRatio posterior_ratio(double delta);

void write_hierarchy_json(std::ostream& out, const MergeHierarchy& hierarchy,
                          const std::vector<std::size_t>& checkpoints = {});

/// One line per axis: "axis<TAB>nested list", leaves are start-model labels
/// and every internal node is the pair merged at some step.
void write_dendrogram(std::ostream& out, const MergeHierarchy& hierarchy);

}  // namespace tricluster
