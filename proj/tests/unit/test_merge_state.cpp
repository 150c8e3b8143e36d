#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/merge_state.hpp"
#include "tricluster/optimizer.hpp"

using namespace tricluster;

namespace {

// Maps a state label of `axis` to its cluster index in the snapshot.
std::uint32_t snapshot_label(const MergeState& state, const Triclustering& start, const Triclustering& snap, Axis axis,
                             std::uint32_t label) {
  if (axis == Axis::Time) {
    const auto reps = state.representatives(axis);
    std::uint32_t position = 0;
    for (std::uint32_t c = 0; c < reps.size(); ++c) {
      if (reps[c] == c && c < label) ++position;
    }
    return position;
  }
  const auto part = axis == Axis::Source ? start.source_partition() : start.destination_partition();
  const auto snap_part = axis == Axis::Source ? snap.source_partition() : snap.destination_partition();
  const auto reps = state.representatives(axis);
  for (std::uint32_t v = 0; v < part.size(); ++v) {
    if (reps[part[v]] == label) return snap_part[v];
  }
  ADD_FAILURE() << "label without members";
  return 0;
}

void expect_consistent(MergeState& state, const Triclustering& start, std::uint64_t seed) {
  const auto snap = state.snapshot();
  EXPECT_NEAR(state.cost(), cost(snap).total, 1e-6) << seed;
  std::optional<MergeChoice> best;
  state.for_each_candidate([&](const MergeChoice& c) {
    const auto a = snapshot_label(state, start, snap, c.axis, c.a);
    const auto b = snapshot_label(state, start, snap, c.axis, c.b);
    EXPECT_NEAR(c.delta, merge_delta(snap, c.axis, a, b), 1e-6) << seed;
    EXPECT_NEAR(state.delta(c.axis, c.a, c.b), c.delta, 1e-9);
    if (!best || c.delta < best->delta - 1e-12) best = c;
  });
  const auto chosen = state.best_merge();
  ASSERT_EQ(chosen.has_value(), best.has_value());
  if (chosen) EXPECT_NEAR(chosen->delta, best->delta, 1e-9) << seed;
}

}  // namespace

TEST(MergeCandidateQueue, DropsStaleEntries) {
  MergeCandidateQueue q;
  q.push({3.0, 0, 1, 0});
  q.push({1.0, 0, 2, 0});
  q.push({1.0, 1, 2, 5});
  auto live = [](const MergeCandidateQueue::Entry& e) { return !(e.a == 0 && e.b == 2); };
  auto top = q.top(live);
  ASSERT_TRUE(top);
  EXPECT_EQ(top->a, 1u);
  EXPECT_EQ(top->stamp, 5u);
  EXPECT_EQ(q.size(), 2u);
}

TEST(MergeCandidateQueue, TiesGoToSmallestPair) {
  MergeCandidateQueue q;
  q.push({-1.0, 2, 3, 0});
  q.push({-1.0, 0, 3, 0});
  q.push({-1.0, 0, 2, 0});
  auto top = q.top([](const auto&) { return true; });
  EXPECT_EQ(top->a, 0u);
  EXPECT_EQ(top->b, 2u);
}

TEST(MergeState, InitialDeltasMatchStandaloneDelta) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = fixtures::random_instance(seed);
    MergeState state(inst.model);
    expect_consistent(state, inst.model, seed);
  }
}

TEST(MergeState, StaysConsistentAlongMergeSequences) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = fixtures::random_instance(1000 + seed);
    MergeState state(inst.model);
    Rng rng(seed);
    while (state.k(Axis::Source) * state.k(Axis::Destination) * state.k(Axis::Time) > 1) {
      std::vector<MergeChoice> all;
      state.for_each_candidate([&](const MergeChoice& c) { all.push_back(c); });
      const auto pick = all[uniform_below(rng, all.size())];
      const double before = state.cost();
      const auto [delta, keep] = state.apply(pick.axis, pick.a, pick.b);
      EXPECT_NEAR(delta, pick.delta, 1e-9);
      EXPECT_NEAR(state.cost(), before + delta, 1e-9);
      EXPECT_TRUE(keep == pick.a || keep == pick.b);
      expect_consistent(state, inst.model, seed);
    }
    EXPECT_NEAR(state.cost(), null_cost(inst.edges).total, 1e-6);
  }
}

TEST(MergeState, TimeMergeKeepsEarlierInterval) {
  const auto model = fixtures::worked_model();
  MergeState state(model);
  const auto [delta, keep] = state.apply(Axis::Time, 1, 2);
  EXPECT_EQ(keep, 1u);
  EXPECT_NEAR(delta, merge_delta(model, Axis::Time, 1, 2), 1e-9);
  EXPECT_THROW(state.delta(Axis::Time, 0, 2), std::invalid_argument);
  const auto snap = state.snapshot();
  EXPECT_EQ(std::vector<std::uint32_t>(snap.time_boundaries().begin(), snap.time_boundaries().end()),
            (std::vector<std::uint32_t>{0, 12, 50}));
}

TEST(MergeState, VertexMergeKeepsLargerCluster) {
  const auto model = fixtures::worked_model();
  MergeState state(model);
  // cluster 2 (30 edges) outweighs cluster 0 (10 edges)
  EXPECT_EQ(state.apply(Axis::Source, 0, 2).second, 2u);
  EXPECT_THROW(state.delta(Axis::Source, 0, 1), std::invalid_argument);
}

TEST(MergeState, RespectsAllowedAxes) {
  MergeState state(fixtures::worked_model());
  const auto only_time = state.best_merge({false, false, true});
  ASSERT_TRUE(only_time);
  EXPECT_EQ(only_time->axis, Axis::Time);
  EXPECT_FALSE(state.best_merge({false, false, false}));
}
