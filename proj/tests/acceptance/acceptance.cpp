// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tricluster/analysis.hpp"
#include "tricluster/coarsen.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/optimizer.hpp"
#include "tricluster/synthgen.hpp"

using namespace tricluster;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

SearchConfig search(std::uint64_t seed) {
  SearchConfig c;
  c.restarts = 16;
  c.max_neighborhood_level = 3;
  c.seed = seed;
  return c;
}

// Every fitted run, for the informativity endpoints.
struct FittedRun {
  double cost_star;
  double cost_null;
  double final_tau;  // after agglomerating to the null model
  bool is_null;
};
std::vector<FittedRun> g_runs;

FitResult fit(const TemporalEdgeList& edges, const SearchConfig& config) {
  auto result = vns_fit(edges, config);
  const auto& model = result.model;
  const bool is_null = model.k_sources() == 1 && model.k_destinations() == 1 && model.k_time() == 1;
  double final_tau = NAN;
  if (!is_null) final_tau = agglomerate(model).records().back().tau_after;
  g_runs.push_back({cost(model).total, null_cost(edges).total, final_tau, is_null});
  return result;
}

bool is_null(const Triclustering& m) { return m.k_sources() == 1 && m.k_destinations() == 1 && m.k_time() == 1; }

Outcome criterion_exactness() {
  const auto start = Clock::now();
  double worst_cost = 0.0, worst_delta = 0.0;
  std::size_t deltas = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto inst = fixtures::random_instance(derive_seed(2024, s));
    const double ours = cost(inst.model).total;
    const double ref = oracle::cost(inst.edges, inst.model);
    worst_cost = std::max(worst_cost, std::abs(ours - ref) / std::max(1.0, std::abs(ref)));
    for (Axis axis : {Axis::Source, Axis::Destination, Axis::Time}) {
      const auto k = inst.model.k(axis);
      for (std::uint32_t b = 1; b < k; ++b) {
        for (std::uint32_t a = axis == Axis::Time ? b - 1 : 0; a < b; ++a) {
          const double d = merge_delta(inst.model, axis, a, b);
          const double full = oracle::cost(inst.edges, merge_clusters(inst.model, axis, a, b)) - ref;
          worst_delta = std::max(worst_delta, std::abs(d - full));
          ++deltas;
        }
      }
    }
  }
  const double t = seconds_since(start);
  return {worst_cost <= 1e-9 && worst_delta <= 1e-6 && t < 60.0,
          format("max_rel_cost_err=%.2e max_delta_err=%.2e deltas=%zu time=%.1fs", worst_cost, worst_delta, deltas, t)};
}

Outcome criterion_recovery() {
  const auto start = Clock::now();
  int hits = 0;
  std::string per_seed;
  for (std::uint64_t s = 0; s < 10; ++s) {
    GeneratorConfig g;
    g.m = 1u << 15;
    g.seed = s;
    const auto data = generate(g);
    const auto r = fit(data.edges, search(s));
    const double ari_s = recovery_score(r.model.source_partition(), data.source_truth);
    const double ari_d = recovery_score(r.model.destination_partition(), data.destination_truth);
    const bool ok = r.model.k_sources() == 5 && r.model.k_destinations() == 5 && ari_s == 1.0 && ari_d == 1.0;
    hits += ok;
    per_seed += ok ? '+' : '-';
  }
  const double t = seconds_since(start);
  return {hits >= 9 && t < 600.0, format("recovered=%d/10 seeds=%s time=%.1fs", hits, per_seed.c_str(), t)};
}

Outcome criterion_null_small() {
  int hits = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    GeneratorConfig g;
    g.m = 1u << 8;
    g.seed = s;
    hits += is_null(fit(generate(g).edges, search(s)).model);
  }
  return {hits >= 9, format("null=%d/10", hits)};
}

Outcome criterion_shuffled() {
  int hits = 0;
  std::string per_seed;
  for (std::uint64_t s = 0; s < 10; ++s) {
    GeneratorConfig g;
    g.m = 1u << 13;
    g.seed = s;
    g.mode = GeneratorMode::Shuffled;
    const auto data = generate(g);
    const auto r = fit(data.edges, search(s));
    const double ari_s = recovery_score(r.model.source_partition(), data.source_truth);
    const double ari_d = recovery_score(r.model.destination_partition(), data.destination_truth);
    const bool ok = r.model.k_time() == 1 && ari_s >= 0.95 && ari_d >= 0.95;
    hits += ok;
    per_seed += format(" %u/%.2f/%.2f", r.model.k_time(), ari_s, ari_d);
  }
  return {hits >= 8, format("stationary=%d/10 (kT/ariS/ariD:%s)", hits, per_seed.c_str())};
}

Outcome criterion_erdos_renyi() {
  int hits = 0, runs = 0;
  for (std::uint64_t m : {1ull << 12, 1ull << 16}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      GeneratorConfig g;
      g.m = m;
      g.seed = s;
      g.mode = GeneratorMode::ErdosRenyi;
      hits += is_null(fit(generate(g).edges, search(s)).model);
      ++runs;
    }
  }
  return {hits == runs, format("null=%d/%d", hits, runs)};
}

Outcome criterion_segment_growth() {
  std::vector<double> medians;
  std::string detail;
  for (int log_m : {13, 15, 17}) {
    std::vector<std::uint32_t> kt;
    for (std::uint64_t s = 0; s < 5; ++s) {
      GeneratorConfig g;
      g.m = 1ull << log_m;
      g.seed = 100 + s;
      kt.push_back(fit(generate(g).edges, search(s)).model.k_time());
    }
    std::sort(kt.begin(), kt.end());
    medians.push_back(kt[kt.size() / 2]);
    detail += format(" 2^%d:%u", log_m, kt[kt.size() / 2]);
  }
  const bool ok = std::is_sorted(medians.begin(), medians.end());
  return {ok, "median_kT" + detail};
}

Outcome criterion_dissimilarity_limit() {
  // Two source groups of 10 vertices with distinct profiles over three
  // destination groups of 10 vertices; a single time segment.
  const double pi0 = 0.4;
  const double profile[2][3] = {{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}};
  std::vector<std::string> sids, dids;
  for (int v = 0; v < 20; ++v) sids.push_back("s" + std::to_string(v));
  for (int v = 0; v < 30; ++v) dids.push_back("d" + std::to_string(v));
  std::vector<std::uint32_t> cs(20), cd(30);
  for (int v = 0; v < 20; ++v) cs[v] = v / 10;
  for (int v = 0; v < 30; ++v) cd[v] = v / 10;

  std::vector<double> gaps;
  std::string detail;
  for (std::uint64_t m : {10000ull, 100000ull, 1000000ull}) {
    Rng rng(derive_seed(7, m));
    std::vector<std::uint32_t> src(m), dst(m);
    std::vector<double> t(m);
    for (std::uint64_t e = 0; e < m; ++e) {
      const int i = uniform_unit(rng) < pi0 ? 0 : 1;
      const double u = uniform_unit(rng);
      const int j = u < profile[i][0] ? 0 : u < profile[i][0] + profile[i][1] ? 1 : 2;
      src[e] = static_cast<std::uint32_t>(i * 10 + uniform_below(rng, 10));
      dst[e] = static_cast<std::uint32_t>(j * 10 + uniform_below(rng, 10));
      t[e] = uniform_unit(rng);
    }
    const auto edges = TemporalEdgeList::from_indices(sids, dids, src, dst, t);
    const auto model = compute_counts(edges, cs, cd, std::vector<std::uint32_t>{0, static_cast<std::uint32_t>(m)});
    const auto check = asymptotic_dissimilarity_check(model, Axis::Source, 0, 1);
    gaps.push_back(check.relative_gap());
    detail += format(" m=%llu:%.3e", static_cast<unsigned long long>(m), check.relative_gap());
  }
  const bool ok = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {ok, "relative_gap" + detail};
}

Outcome criterion_informativity_endpoints() {
  if (g_runs.empty()) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      GeneratorConfig g;
      g.m = 1u << 12;
      g.seed = s;
      fit(generate(g).edges, search(s));
    }
  }
  int structured = 0, exact = 0, null_runs = 0, null_ok = 0;
  for (const auto& r : g_runs) {
    const auto at_star = informativity(r.cost_star, r.cost_star, r.cost_null);
    const auto at_null = informativity(r.cost_null, r.cost_star, r.cost_null);
    if (r.is_null) {
      ++null_runs;
      null_ok += at_star.undefined && at_null.undefined;
      continue;
    }
    ++structured;
    exact += !at_star.undefined && at_star.value == 1.0 && at_null.value == 0.0 && r.final_tau == 0.0;
  }
  return {structured > 0 && exact == structured && null_ok == null_runs,
          format("exact=%d/%d null_runs_undefined=%d/%d", exact, structured, null_ok, null_runs)};
}

Outcome criterion_exhaustive() {
  int hits = 0;
  std::string misses;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(derive_seed(99, s));
    const auto edges = fixtures::random_edges(rng, 4, 4, 20);
    const auto best = oracle::exhaustive_optimum(edges);
    auto config = search(s);
    config.initial_time_granularity = static_cast<std::uint32_t>(edges.num_edges());
    const double found = cost(fit(edges, config).model).total;
    const bool ok = found <= best.cost + 1e-9 * std::max(1.0, std::abs(best.cost));
    hits += ok;
    if (!ok) misses += format(" #%llu(+%.3g)", static_cast<unsigned long long>(s), found - best.cost);
  }
  return {hits >= 18, format("optimal=%d/20%s", hits, misses.c_str())};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"criterion_exactness", criterion_exactness},
      {"structure_recovery_2^15", criterion_recovery},
      {"null_detection_2^8", criterion_null_small},
      {"stationarity_detection_2^13", criterion_shuffled},
      {"erdos_renyi_null", criterion_erdos_renyi},
      {"time_segment_growth", criterion_segment_growth},
      {"dissimilarity_limit_convergence", criterion_dissimilarity_limit},
      {"informativity_endpoints", criterion_informativity_endpoints},
      {"exhaustive_optimum", criterion_exhaustive},
  };
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failures = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    if (!selected.empty() && !selected.contains(static_cast<int>(n + 1))) continue;
    const auto start = Clock::now();
    const auto outcome = criteria[n].check();
    failures += !outcome.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", n + 1, criteria[n].name,
                outcome.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
