#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "tricluster/triclustering.hpp"

namespace tricluster {

/// Unsalted 64-bit mixer so that hash-map iteration order, and with it every
/// floating-point accumulation order, is identical across processes.
struct StableHash {
  std::size_t operator()(std::uint64_t x) const noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

/// Min-ordered merge candidates of one axis with lazy invalidation. Each entry
/// carries the stamp of its pair at push time; entries whose stamp no longer
/// matches, or whose clusters are gone, are dropped when they reach the top.
class MergeCandidateQueue {
 public:
  struct Entry {
    double delta = 0.0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t stamp = 0;
  };

  void push(const Entry& e) { heap_.push(e); }

  /// Top live entry, discarding stale ones on the way.
  template <class IsLive>
  std::optional<Entry> top(IsLive&& is_live) {
    while (!heap_.empty()) {
      const Entry& e = heap_.top();
      if (is_live(e)) return e;
      heap_.pop();
    }
    return std::nullopt;
  }

  std::size_t size() const noexcept { return heap_.size(); }
  bool empty() const noexcept { return heap_.empty(); }
  void clear() { heap_ = {}; }

 private:
  struct Later {
    bool operator()(const Entry& x, const Entry& y) const {
      if (x.delta != y.delta) return x.delta > y.delta;
      if (x.a != y.a) return x.a > y.a;
      return x.b > y.b;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
};

/// A candidate merge with its exact cost change.
struct MergeChoice {
  Axis axis = Axis::Source;
  std::uint32_t a = 0;  // for time merges: the earlier interval
  std::uint32_t b = 0;
  double delta = 0.0;
};

/// Mutable search state supporting O(touched cells) merges.
///
/// Cluster labels are those of the model the state was built from; a merge
/// keeps one label alive and retires the other. The criterion is additive,
/// so every merge delta splits into a global part shared by all candidates of
/// an axis and a local part (cluster statistics minus the cell interaction
/// sum) that only changes when a touched cell changes.
class MergeState {
 public:
  explicit MergeState(const Triclustering& model);

  double cost() const noexcept { return cost_; }
  std::uint32_t k(Axis axis) const noexcept { return k_[static_cast<int>(axis)]; }

  /// Cheapest legal merge over the allowed axes; ties go to the smallest
  /// (axis, a, b). Empty when no axis allows a merge.
  std::optional<MergeChoice> best_merge(std::array<bool, 3> allowed = {true, true, true});

  /// Applies a merge and returns {delta, surviving label}. For time merges a
  /// must be immediately followed by b.
  std::pair<double, std::uint32_t> apply(Axis axis, std::uint32_t a, std::uint32_t b);

  /// Current delta of merging a and b (time: a must precede b directly).
  double delta(Axis axis, std::uint32_t a, std::uint32_t b) const;

  /// Visits every legal merge with its current delta.
  void for_each_candidate(const std::function<void(const MergeChoice&)>& visit) const;

  /// Current model, with vertex clusters ordered by smallest member vertex and
  /// intervals in time order.
  Triclustering snapshot() const;

  /// Surviving label of each original cluster of an axis.
  std::vector<std::uint32_t> representatives(Axis axis) const;

 private:
  using CellMap = absl::flat_hash_map<std::uint64_t, std::int64_t, StableHash>;

  struct Entry {
    std::uint32_t y;
    std::uint32_t z;
    std::int64_t keep;
    std::int64_t gone;
  };

  static std::size_t tri(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return static_cast<std::size_t>(b) * (b - 1) / 2 + a;
  }

  double vertex_local(int axis, std::uint32_t a, std::uint32_t b) const;
  double time_local(std::uint32_t l) const;
  double global_delta(int axis) const;
  std::int64_t other_product(int axis) const;

  void init_vertex_gains(int axis);
  void init_time_gains();
  void push_vertex(int axis, std::uint32_t a, std::uint32_t b);
  void push_time(std::uint32_t l);
  bool live(int axis, const MergeCandidateQueue::Entry& e) const;

  void update_cross(int axis, std::uint32_t keep, std::uint32_t gone, int other);
  void move_cells(int axis, std::uint32_t keep, std::uint32_t gone);
  double intersect_gain(const CellMap& x, const CellMap& y) const;

  Triclustering base_;
  std::int64_t m_ = 0;
  std::array<std::int64_t, 2> universe_{};
  std::array<std::uint32_t, 3> k_{};
  std::array<std::vector<char>, 3> alive_;
  std::array<std::vector<std::int64_t>, 3> marginal_;
  std::array<std::vector<std::int64_t>, 2> size_;
  std::array<std::vector<CellMap>, 3> view_;
  std::array<std::vector<std::uint32_t>, 3> rep_;
  std::array<std::vector<std::vector<std::uint32_t>>, 3> members_;
  std::array<std::vector<double>, 2> gain_;         // triangular, vertex axes
  std::array<std::vector<std::uint32_t>, 2> stamp_;  // triangular, vertex axes
  std::vector<double> time_gain_;                    // pair (l, next[l])
  std::vector<std::uint32_t> time_stamp_;
  std::vector<std::int64_t> next_;
  std::vector<std::int64_t> prev_;
  std::array<MergeCandidateQueue, 3> queue_;
  double cost_ = 0.0;
};

}  // namespace tricluster
