#include "tricluster/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "tricluster/criterion.hpp"
#include "tricluster/merge_state.hpp"

namespace tricluster {

MergeHierarchy::MergeHierarchy(Triclustering start, double start_cost, double null_cost,
                               std::vector<MergeRecord> records)
    : start_(std::move(start)), start_cost_(start_cost), null_cost_(null_cost), records_(std::move(records)) {}

Triclustering MergeHierarchy::replay(std::size_t step) const {
  if (step > records_.size()) throw std::out_of_range("replay step beyond the hierarchy");
  if (step == 0) return start_;
  std::array<std::vector<std::uint32_t>, 3> parent;
  for (int x = 0; x < 3; ++x) {
    parent[x].resize(start_.k(static_cast<Axis>(x)));
    std::iota(parent[x].begin(), parent[x].end(), 0u);
  }
  for (std::size_t s = 0; s < step; ++s) {
    parent[static_cast<int>(records_[s].axis)][records_[s].gone] = records_[s].keep;
  }
  for (auto& p : parent) {
    for (std::uint32_t c = 0; c < p.size(); ++c) {
      auto r = c;
      while (p[r] != r) r = p[r];
      p[c] = r;
    }
  }
  return collapse_clusters(start_, parent[0], parent[1], parent[2]);
}

double MergeHierarchy::replay_error() const {
  double worst = 0.0;
  for (std::size_t s = 1; s <= records_.size(); ++s) {
    const double c = cost(replay(s)).total;
    worst = std::max(worst, std::abs(c - records_[s - 1].cost_after) / std::max(1.0, std::abs(c)));
  }
  return worst;
}

MergeHierarchy agglomerate(const Triclustering& best, const StopRule& stop) {
  if (!(stop.tau_min <= 1.0)) throw std::domain_error("tau_min must not exceed 1");
  const double c_null = null_cost(best).total;
  MergeState state(best);
  const double c_start = state.cost();
  double baseline = c_start;
  std::vector<MergeRecord> records;

  auto targets_met = [&] {
    bool constrained = false;
    for (int x = 0; x < 3; ++x) {
      if (stop.target[x] == 0) continue;
      constrained = true;
      if (state.k(static_cast<Axis>(x)) > stop.target[x]) return false;
    }
    return constrained;
  };

  while (!targets_met()) {
    std::array<bool, 3> allowed{};
    for (int x = 0; x < 3; ++x) allowed[x] = state.k(static_cast<Axis>(x)) > std::max<std::uint32_t>(1, stop.target[x]);
    auto choice = state.best_merge(allowed);
    if (!choice) break;
    const bool reaches_null = state.k(Axis::Source) * state.k(Axis::Destination) * state.k(Axis::Time) ==
                              state.k(choice->axis);
    double after = state.cost() + choice->delta;
    if (reaches_null) after = c_null;
    const bool reset = after < baseline - 1e-9;
    const auto tau = reset ? Informativity{1.0, false} : informativity(after, baseline, c_null);
    if (stop.tau_min > 0.0 && !reset && !tau.undefined && tau.value < stop.tau_min) break;

    const auto [delta, keep] = state.apply(choice->axis, choice->a, choice->b);
    MergeRecord r;
    r.step = records.size() + 1;
    r.axis = choice->axis;
    r.keep = keep;
    r.gone = keep == choice->a ? choice->b : choice->a;
    r.delta = delta;
    r.cost_after = after;
    r.tau_after = tau.value;
    r.baseline_reset = reset;
    r.k_sources = state.k(Axis::Source);
    r.k_destinations = state.k(Axis::Destination);
    r.k_time = state.k(Axis::Time);
    if (reset) baseline = after;
    records.push_back(r);
  }
  return MergeHierarchy(best, c_start, c_null, std::move(records));
}

PosteriorRatio posterior_ratio(double delta) {
  if (!std::isfinite(delta)) throw std::invalid_argument("posterior_ratio: delta must be finite");
  PosteriorRatio r;
  r.log_ratio = delta;
  r.ratio = std::exp(delta);
  if (std::isinf(r.ratio)) r.overflow = true;
  return r;
}

void write_hierarchy_json(std::ostream& out, const MergeHierarchy& hierarchy,
                          const std::vector<std::size_t>& checkpoints) {
  using nlohmann::json;
  const auto& start = hierarchy.start();
  json doc;
  doc["schema"] = "tricluster.hierarchy/1";
  doc["start"] = {{"cost", hierarchy.start_cost()},
                  {"k_sources", start.k_sources()},
                  {"k_destinations", start.k_destinations()},
                  {"k_time", start.k_time()}};
  doc["null_cost"] = hierarchy.null_cost();
  json merges = json::array();
  json notices = json::array();
  for (const auto& r : hierarchy.records()) {
    merges.push_back({{"step", r.step},
                      {"axis", axis_name(r.axis)},
                      {"keep", r.keep},
                      {"gone", r.gone},
                      {"delta", r.delta},
                      {"cost_after", r.cost_after},
                      {"tau_after", r.tau_after},
                      {"baseline_reset", r.baseline_reset},
                      {"k_sources", r.k_sources},
                      {"k_destinations", r.k_destinations},
                      {"k_time", r.k_time}});
    if (r.baseline_reset) {
      notices.push_back("step " + std::to_string(r.step) + " found a model cheaper than the start; tau baseline reset");
    }
  }
  doc["merges"] = std::move(merges);
  doc["notices"] = std::move(notices);
  json cps = json::array();
  for (auto step : checkpoints) {
    const auto model = hierarchy.replay(step);
    json cp{{"step", step}};
    cp["source_partition"] = std::vector<std::uint32_t>(model.source_partition().begin(), model.source_partition().end());
    cp["destination_partition"] =
        std::vector<std::uint32_t>(model.destination_partition().begin(), model.destination_partition().end());
    cp["time_boundaries"] = std::vector<std::uint32_t>(model.time_boundaries().begin(), model.time_boundaries().end());
    cps.push_back(std::move(cp));
  }
  doc["checkpoints"] = std::move(cps);
  out << doc.dump(2) << '\n';
}

void write_dendrogram(std::ostream& out, const MergeHierarchy& hierarchy) {
  for (int x = 0; x < 3; ++x) {
    const auto axis = static_cast<Axis>(x);
    const auto k = hierarchy.start().k(axis);
    std::vector<std::string> node(k);
    std::vector<bool> alive(k, true);
    for (std::uint32_t c = 0; c < k; ++c) node[c] = std::to_string(c);
    for (const auto& r : hierarchy.records()) {
      if (r.axis != axis) continue;
      const auto lo = std::min(r.keep, r.gone), hi = std::max(r.keep, r.gone);
      node[r.keep] = "[" + node[lo] + ", " + node[hi] + "]";
      alive[r.gone] = false;
    }
    out << axis_name(axis) << "\t[";
    bool first = true;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (!alive[c]) continue;
      out << (first ? "" : ", ") << node[c];
      first = false;
    }
    out << "]\n";
  }
}

}  // namespace tricluster
