#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/errors.hpp"

using namespace tricluster;

namespace {

TemporalEdgeList repeated_edge(int m) {
  std::vector<RawEdge> raw;
  for (int n = 0; n < m; ++n) raw.push_back({"a", "x", double(n)});
  return TemporalEdgeList::from_raw(raw);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// All legal merges of a model as (axis, a, b).
std::vector<std::tuple<Axis, std::uint32_t, std::uint32_t>> legal_merges(const Triclustering& model) {
  std::vector<std::tuple<Axis, std::uint32_t, std::uint32_t>> out;
  for (Axis axis : {Axis::Source, Axis::Destination}) {
    for (std::uint32_t b = 0; b < model.k(axis); ++b) {
      for (std::uint32_t a = 0; a < b; ++a) out.emplace_back(axis, a, b);
    }
  }
  for (std::uint32_t l = 0; l + 1 < model.k_time(); ++l) out.emplace_back(Axis::Time, l, l + 1);
  return out;
}

Triclustering two_by_two(std::int64_t m11, std::int64_t m12, std::int64_t m21, std::int64_t m22) {
  TriclusteringParts p;
  p.source_partition = {0, 1};
  p.destination_partition = {0, 1};
  const std::int64_t m = m11 + m12 + m21 + m22;
  p.time_boundaries = {0, static_cast<std::uint32_t>(m)};
  p.cells = {{0, 0, 0, m11}, {0, 1, 0, m12}, {1, 0, 0, m21}, {1, 1, 0, m22}};
  p.out_degrees = {m11 + m12, m21 + m22};
  p.in_degrees = {m11 + m21, m12 + m22};
  p.source_ids = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"s0", "s1"});
  p.destination_ids = std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"d0", "d1"});
  return Triclustering(p);
}

}  // namespace

TEST(Cost, SingleEdgeNullModelIsZero) {
  const auto edges = repeated_edge(1);
  EXPECT_NEAR(cost(null_model(edges)).total, 0.0, 1e-15);
  EXPECT_NEAR(null_cost(edges).total, 0.0, 1e-15);
}

TEST(Cost, TwoEdgesNullModel) {
  const auto edges = repeated_edge(2);
  EXPECT_NEAR(cost(null_model(edges)).total, 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(null_cost(edges).total, 2.0 * std::log(2.0), 1e-12);
}

TEST(Cost, WorkedExampleMatchesExactOracle) {
  const auto edges = fixtures::worked_edges();
  const auto model = fixtures::worked_model();
  const double exact = oracle::cost(edges, model);
  EXPECT_LE(rel(cost(model).total, exact), 1e-9);
}

TEST(Cost, BreakdownSumsToTotal) {
  const auto c = cost(fixtures::worked_model());
  EXPECT_EQ(c.prior_terms.size(), 8u);
  EXPECT_EQ(c.likelihood_terms.size(), 4u);
  EXPECT_LE(rel(c.prior() + c.likelihood(), c.total), 1e-12);
  EXPECT_GE(c.likelihood(), 0.0);
  EXPECT_NEAR(c.term("log_edge_count"), std::log(50.0), 1e-12);
  EXPECT_NEAR(c.term("source_partition"), oracle::log_bell_prefix(6, 3), 1e-12);
  EXPECT_THROW(c.term("nonexistent"), std::out_of_range);
}

TEST(Cost, BreakdownExport) {
  std::ostringstream out;
  write_cost_breakdown(out, cost(fixtures::worked_model()));
  const auto text = out.str();
  EXPECT_EQ(text.rfind("term\tvalue\n", 0), 0u);
  EXPECT_NE(text.find("tricluster_assignment\t"), std::string::npos);
  EXPECT_NE(text.find("\ntotal\t"), std::string::npos);
}

TEST(Cost, RandomInstancesMatchExactOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = fixtures::random_instance(seed);
    const auto c = cost(inst.model);
    EXPECT_LE(rel(c.total, oracle::cost(inst.edges, inst.model)), 1e-9) << seed;
    EXPECT_GE(c.likelihood(), -1e-9) << seed;
  }
}

TEST(NullCost, ClosedFormMatchesNullModel) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = fixtures::random_instance(seed);
    EXPECT_LE(rel(null_cost(inst.edges).total, cost(null_model(inst.edges)).total), 1e-12) << seed;
    EXPECT_LE(rel(null_cost(inst.model).total, null_cost(inst.edges).total), 1e-12) << seed;
  }
  const auto edges = fixtures::worked_edges();
  const auto merged = aggregate(fixtures::worked_model(), std::vector<std::uint32_t>{0, 0, 0},
                                std::vector<std::uint32_t>{0, 0}, std::vector<std::uint32_t>{0, 0, 0});
  EXPECT_EQ(null_cost(edges).total, null_cost(merged).total);
  EXPECT_LE(rel(null_cost(edges).total, cost(merged).total), 1e-12);
}

TEST(NullCost, HandFormula) {
  const auto edges = fixtures::worked_edges();
  const double m = 50;
  double expected = std::log(6.0) + std::log(8.0) + std::log(m) + oracle::log_binomial(50 + 5, 5) +
                    oracle::log_binomial(50 + 7, 7) + 3 * oracle::log_factorial(50);
  for (auto d : fixtures::kWorkedOutDegrees) expected -= oracle::log_factorial(d);
  for (auto d : fixtures::kWorkedInDegrees) expected -= oracle::log_factorial(d);
  EXPECT_LE(rel(null_cost(edges).total, expected), 1e-12);
}

TEST(MergeDelta, WorkedExampleAllPairs) {
  const auto model = fixtures::worked_model();
  const double base = cost(model).total;
  for (const auto& [axis, a, b] : legal_merges(model)) {
    const double full = cost(merge_clusters(model, axis, a, b)).total - base;
    EXPECT_NEAR(merge_delta(model, axis, a, b), full, 1e-6) << axis_name(axis) << a << b;
    EXPECT_NEAR(merge_delta(model, axis, b, a), full, 1e-6);
  }
}

TEST(MergeDelta, NonAdjacentTimeMerge) {
  EXPECT_THROW(merge_delta(fixtures::worked_model(), Axis::Time, 0, 2), OrderingError);
  EXPECT_THROW(merge_delta(fixtures::worked_model(), Axis::Source, 1, 1), std::invalid_argument);
}

TEST(MergeDelta, RandomInstancesMatchRecomputation) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = fixtures::random_instance(seed);
    const double base = cost(inst.model).total;
    for (const auto& [axis, a, b] : legal_merges(inst.model)) {
      const double full = cost(merge_clusters(inst.model, axis, a, b)).total - base;
      EXPECT_NEAR(merge_delta(inst.model, axis, a, b), full, 1e-6) << seed;
    }
  }
}

TEST(MergeDelta, LastMergeReachesNullCost) {
  const auto edges = fixtures::worked_edges();
  const auto model = compute_counts(edges, fixtures::kWorkedSourcePartition, std::vector<std::uint32_t>(8, 0),
                                    std::vector<std::uint32_t>{0, 50});
  const auto two = aggregate(model, std::vector<std::uint32_t>{0, 1, 1}, std::vector<std::uint32_t>{0},
                             std::vector<std::uint32_t>{0});
  EXPECT_NEAR(cost(two).total + merge_delta(two, Axis::Source, 0, 1), null_cost(edges).total, 1e-9);
}

TEST(MergeDelta, IdenticalRowsAttract) {
  // s0 and s1 send the same edges to d0; s2 and s3 have distinct targets.
  std::vector<RawEdge> raw;
  double t = 0.0;
  for (int n = 0; n < 5; ++n) raw.push_back({"s0", "d0", t++});
  for (int n = 0; n < 5; ++n) raw.push_back({"s1", "d0", t++});
  for (int n = 0; n < 5; ++n) raw.push_back({"s2", "d1", t++});
  for (int n = 0; n < 3; ++n) raw.push_back({"s3", "d2", t++});
  for (int n = 0; n < 2; ++n) raw.push_back({"s3", "d3", t++});
  const auto edges = TemporalEdgeList::from_raw(raw);
  const auto singletons = compute_counts(edges, std::vector<std::uint32_t>{0, 1, 2, 3},
                                         std::vector<std::uint32_t>{0, 1, 2, 3}, std::vector<std::uint32_t>{0, 20});
  EXPECT_LT(merge_delta(singletons, Axis::Source, 0, 1), 0.0);
  const auto best = oracle::exhaustive_optimum(edges);
  EXPECT_EQ(best.source_partition[0], best.source_partition[1]);
}

TEST(Likelihood, SharperCubesAreNeverWorse) {
  // 2x2x1 cubes with fixed margins: some unit move towards a zero cell never
  // raises the likelihood, and the best cube has an empty cell.
  for (std::int64_t a = 1; a <= 6; ++a) {
    for (std::int64_t b = 1; b <= 6; ++b) {
      for (std::int64_t c = 1; c <= 6; ++c) {
        const std::int64_t m = a + b;
        const std::int64_t d = m - c;
        if (d < 1) continue;
        const std::int64_t lo = std::max<std::int64_t>(0, a - d), hi = std::min(a, c);
        double best = INFINITY;
        std::int64_t best_x = -1;
        std::vector<double> lik;
        for (std::int64_t x = lo; x <= hi; ++x) {
          const double v = cost(two_by_two(x, a - x, c - x, d - a + x)).likelihood();
          lik.push_back(v);
          if (v < best - 1e-12) {
            best = v;
            best_x = x;
          }
        }
        EXPECT_TRUE(best_x == lo || best_x == hi) << a << b << c;
        for (std::size_t n = 1; n + 1 < lik.size(); ++n) {
          EXPECT_TRUE(lik[n - 1] <= lik[n] + 1e-9 || lik[n + 1] <= lik[n] + 1e-9);
        }
      }
    }
  }
}

TEST(Informativity, Endpoints) {
  EXPECT_EQ(informativity(100.0, 80.0, 100.0).value, 0.0);
  EXPECT_EQ(informativity(80.0, 80.0, 100.0).value, 1.0);
  EXPECT_DOUBLE_EQ(informativity(90.0, 80.0, 100.0).value, 0.5);
  const auto undefined = informativity(100.0, 100.0, 100.0);
  EXPECT_TRUE(undefined.undefined);
  EXPECT_EQ(undefined.value, 0.0);
  EXPECT_FALSE(std::signbit(informativity(100.0, 120.0, 100.0).value));
}
