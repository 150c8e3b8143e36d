#include "tricluster/optimizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "cost_terms.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/random.hpp"

namespace tricluster {

std::uint32_t auto_granularity(std::size_t m) {
  auto g = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  while (static_cast<std::uint64_t>(g) * g < m) ++g;
  while (g > 1 && static_cast<std::uint64_t>(g - 1) * (g - 1) >= m) --g;
  return std::max<std::uint32_t>(g, 1);
}

namespace {

std::vector<std::uint32_t> equal_frequency_boundaries(std::size_t m, std::uint32_t intervals) {
  intervals = static_cast<std::uint32_t>(std::min<std::size_t>(std::max<std::uint32_t>(intervals, 1), m));
  std::vector<std::uint32_t> b(intervals + 1);
  for (std::uint32_t l = 0; l <= intervals; ++l) {
    b[l] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(l) * m / intervals);
  }
  return b;
}

}  // namespace

Triclustering initial_solution(const TemporalEdgeList& edges, std::optional<std::uint32_t> granularity) {
  std::vector<std::uint32_t> s(edges.num_sources());
  std::vector<std::uint32_t> d(edges.num_destinations());
  std::iota(s.begin(), s.end(), 0u);
  std::iota(d.begin(), d.end(), 0u);
  const auto g = granularity.value_or(auto_granularity(edges.num_edges()));
  return compute_counts(edges, s, d, equal_frequency_boundaries(edges.num_edges(), g));
}

Triclustering greedy_merge(const Triclustering& start, GreedyStats* stats) {
  // Full agglomeration down to the null model, always taking the cheapest
  // merge; the best model met on the way is the improved solution.
  struct Step {
    int axis;
    std::uint32_t keep, gone;
  };
  std::vector<Step> path;
  std::size_t best_step = 0;
  {
    MergeState state(start);
    double best = state.cost();
    while (auto choice = state.best_merge()) {
      const auto [delta, keep] = state.apply(choice->axis, choice->a, choice->b);
      (void)delta;
      path.push_back({static_cast<int>(choice->axis), keep, keep == choice->a ? choice->b : choice->a});
      if (state.cost() < best - kImprovementEps) {
        if (stats) stats->accepted_deltas.push_back(state.cost() - best);
        best = state.cost();
        best_step = path.size();
      }
    }
  }

  Triclustering model = start;
  if (best_step > 0) {
    std::array<std::vector<std::uint32_t>, 3> parent;
    for (int x = 0; x < 3; ++x) {
      parent[x].resize(start.k(static_cast<Axis>(x)));
      std::iota(parent[x].begin(), parent[x].end(), 0u);
    }
    for (std::size_t s = 0; s < best_step; ++s) parent[path[s].axis][path[s].gone] = path[s].keep;
    for (auto& p : parent) {
      for (std::uint32_t c = 0; c < p.size(); ++c) {
        auto r = c;
        while (p[r] != r) r = p[r];
        p[c] = r;
      }
    }
    model = collapse_clusters(start, parent[0], parent[1], parent[2]);
  }

  // Descent from there until no single merge improves.
  MergeState state(model);
  int polish = 0;
  while (auto choice = state.best_merge()) {
    if (choice->delta >= -kImprovementEps) break;
    state.apply(choice->axis, choice->a, choice->b);
    ++polish;
    if (stats) stats->accepted_deltas.push_back(choice->delta);
  }
  if (stats) stats->merges = static_cast<int>(best_step) + polish;
  return polish > 0 ? state.snapshot() : model;
}

namespace {

using CellMap = absl::flat_hash_map<std::uint64_t, std::int64_t, StableHash>;

inline std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// One pass of single-vertex moves on a vertex axis. Returns the number of moves.
int reassign_pass(const TemporalEdgeList& edges, std::vector<std::uint32_t>& part,
                  std::span<const std::uint32_t> other_part, std::span<const std::uint32_t> interval_of_rank,
                  bool source_axis) {
  using detail::lf;
  const std::size_t n = part.size();
  std::uint32_t k = 0;
  for (auto c : part) k = std::max(k, c + 1);
  if (k < 2) return 0;

  auto own = source_axis ? edges.sources() : edges.destinations();
  auto other = source_axis ? edges.destinations() : edges.sources();
  auto ranks = edges.time_ranks();

  // Per-vertex cells keyed by (other cluster, interval).
  std::vector<std::pair<std::uint32_t, std::uint64_t>> pairs(edges.num_edges());
  for (std::size_t e = 0; e < edges.num_edges(); ++e) {
    pairs[e] = {own[e], pack(other_part[other[e]], interval_of_rank[ranks[e]])};
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::size_t> start(n + 1, 0);
  std::vector<std::pair<std::uint64_t, std::int64_t>> cells;
  for (std::size_t p = 0; p < pairs.size();) {
    std::size_t q = p;
    while (q < pairs.size() && pairs[q] == pairs[p]) ++q;
    cells.emplace_back(pairs[p].second, static_cast<std::int64_t>(q - p));
    ++start[pairs[p].first + 1];
    p = q;
  }
  for (std::size_t v = 0; v < n; ++v) start[v + 1] += start[v];

  std::vector<std::int64_t> degree(n, 0);
  for (auto v : own) ++degree[v];
  std::vector<CellMap> mu(k);
  std::vector<std::int64_t> marginal(k, 0), size(k, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = part[v];
    ++size[c];
    marginal[c] += degree[v];
    for (auto p = start[v]; p < start[v + 1]; ++p) mu[c][cells[p].first] += cells[p].second;
  }

  auto count_in = [&](std::uint32_t c, std::uint64_t key) -> std::int64_t {
    auto it = mu[c].find(key);
    return it == mu[c].end() ? 0 : it->second;
  };

  int moves = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto a = part[v];
    if (size[a] < 2) continue;
    const auto deg = degree[v];
    double leave = 0.0;
    for (auto p = start[v]; p < start[v + 1]; ++p) {
      const auto x = cells[p].second;
      const auto mua = count_in(a, cells[p].first);
      leave += lf(mua - x) - lf(mua);
    }
    const double leave_base = detail::degree_list_term(marginal[a] - deg, size[a] - 1) -
                              detail::degree_list_term(marginal[a], size[a]) + lf(marginal[a] - deg) -
                              lf(marginal[a]);
    double best = 0.0;
    std::uint32_t best_c = a;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (c == a) continue;
      double join = 0.0;
      for (auto p = start[v]; p < start[v + 1]; ++p) {
        const auto muc = count_in(c, cells[p].first);
        join += lf(muc + cells[p].second) - lf(muc);
      }
      const double delta = leave_base + detail::degree_list_term(marginal[c] + deg, size[c] + 1) -
                           detail::degree_list_term(marginal[c], size[c]) + lf(marginal[c] + deg) -
                           lf(marginal[c]) - (leave + join);
      if (delta < best) {
        best = delta;
        best_c = c;
      }
    }
    if (best_c == a || best >= -kImprovementEps) continue;
    for (auto p = start[v]; p < start[v + 1]; ++p) {
      auto it = mu[a].find(cells[p].first);
      it->second -= cells[p].second;
      if (it->second == 0) mu[a].erase(it);
      mu[best_c][cells[p].first] += cells[p].second;
    }
    marginal[a] -= deg;
    marginal[best_c] += deg;
    --size[a];
    ++size[best_c];
    part[v] = best_c;
    ++moves;
  }
  return moves;
}

}  // namespace

Triclustering refine_reassign(const TemporalEdgeList& edges, const Triclustering& model) {
  auto s = std::vector<std::uint32_t>(model.source_partition().begin(), model.source_partition().end());
  auto d = std::vector<std::uint32_t>(model.destination_partition().begin(), model.destination_partition().end());
  std::vector<std::uint32_t> interval(edges.num_edges() + 1, 0);
  for (std::uint32_t r = 1; r <= edges.num_edges(); ++r) interval[r] = model.interval_of_rank(r);
  int moved = 0;
  do {
    moved = reassign_pass(edges, s, d, interval, true);
    moved += reassign_pass(edges, d, s, interval, false);
  } while (moved > 0);
  return canonical(compute_counts(edges, s, d, model.time_boundaries()));
}

namespace {

// Splits `count` random clusters per axis back to singletons (vertices) or to
// the finest grid intervals they contain (time).
Triclustering perturb(const TemporalEdgeList& edges, const Triclustering& model, int level,
                      std::span<const std::uint32_t> finest, Rng& rng) {
  const std::uint64_t count = std::uint64_t{1} << std::min(level, 30);

  auto split_vertices = [&](std::span<const std::uint32_t> part, std::uint32_t k) {
    std::vector<std::uint32_t> labels(k);
    std::iota(labels.begin(), labels.end(), 0u);
    shuffle_range(labels.begin(), labels.end(), rng);
    std::vector<char> chosen(k, 0);
    for (std::uint64_t c = 0; c < std::min<std::uint64_t>(count, k); ++c) chosen[labels[c]] = 1;
    std::vector<std::uint32_t> remap(k, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (!chosen[c]) remap[c] = next++;
    }
    std::vector<std::uint32_t> out(part.size());
    for (std::size_t v = 0; v < part.size(); ++v) out[v] = chosen[part[v]] ? next++ : remap[part[v]];
    return out;
  };
  auto s = split_vertices(model.source_partition(), model.k_sources());
  auto d = split_vertices(model.destination_partition(), model.k_destinations());

  auto bounds = model.time_boundaries();
  std::vector<std::uint32_t> labels(model.k_time());
  std::iota(labels.begin(), labels.end(), 0u);
  shuffle_range(labels.begin(), labels.end(), rng);
  std::vector<std::uint32_t> cuts(bounds.begin(), bounds.end());
  for (std::uint64_t c = 0; c < std::min<std::uint64_t>(count, labels.size()); ++c) {
    const auto lo = bounds[labels[c]];
    const auto hi = bounds[labels[c] + 1];
    for (auto f : finest) {
      if (f > lo && f < hi) cuts.push_back(f);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return compute_counts(edges, s, d, cuts);
}

unsigned thread_cap(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TRICLUSTER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Candidate {
  std::optional<Triclustering> model;
  double cost = 0.0;
  int merges = 0;
  double seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Candidate run_restart(const TemporalEdgeList& edges, const Triclustering& from, int level,
                      std::span<const std::uint32_t> finest, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  GreedyStats first, second;
  auto model = greedy_merge(perturb(edges, from, level, finest, rng), &first);
  model = greedy_merge(refine_reassign(edges, model), &second);
  Candidate c;
  c.cost = cost(model).total;
  c.merges = first.merges + second.merges;
  c.model = std::move(model);
  c.seconds = seconds_since(t0);
  return c;
}

RestartRecord record_of(int index, int level, const Candidate& c, double best, bool improved) {
  return RestartRecord{index,
                       level,
                       c.cost,
                       best,
                       c.merges,
                       c.seconds,
                       c.model->k_sources(),
                       c.model->k_destinations(),
                       c.model->k_time(),
                       improved};
}

}  // namespace

FitResult vns_fit(const TemporalEdgeList& edges, const SearchConfig& config) {
  if (config.restarts < 1) throw std::invalid_argument("vns_fit: restarts must be >= 1");
  if (config.max_neighborhood_level < 1) throw std::invalid_argument("vns_fit: neighborhood level must be >= 1");
  const auto t_start = std::chrono::steady_clock::now();
  SearchReport report;
  report.null_cost = null_cost(edges).total;

  if (edges.num_edges() == 1) {
    auto model = null_model(edges);
    report.best_cost = cost(model).total;
    report.restarts.push_back({0, 0, report.best_cost, report.best_cost, 0, 0.0, 1, 1, 1, true});
    return {std::move(model), std::move(report)};
  }

  const auto granularity = config.initial_time_granularity.value_or(auto_granularity(edges.num_edges()));
  const auto finest = equal_frequency_boundaries(edges.num_edges(), granularity);

  Candidate first;
  {
    const auto t0 = std::chrono::steady_clock::now();
    GreedyStats stats;
    first.model = greedy_merge(initial_solution(edges, granularity), &stats);
    first.cost = cost(*first.model).total;
    first.merges = stats.merges;
    first.seconds = seconds_since(t0);
  }
  report.restarts.push_back(record_of(0, 0, first, first.cost, true));
  Triclustering incumbent = *first.model;
  double best = first.cost;

  auto over_budget = [&] {
    return config.time_budget_seconds && seconds_since(t_start) > *config.time_budget_seconds;
  };

  if (config.parallel_restarts && config.restarts > 1) {
    const int n = config.restarts - 1;
    std::vector<Candidate> results(n);
    std::vector<char> done(n, 0);
    std::atomic<int> next{0};
    std::atomic<bool> budget{false};
    auto worker = [&] {
      for (int r; (r = next.fetch_add(1)) < n;) {
        if (over_budget()) {
          budget = true;
          continue;
        }
        const int level = 1 + r % config.max_neighborhood_level;
        results[r] = run_restart(edges, *first.model, level, finest, derive_seed(config.seed, 1, r + 1));
        done[r] = 1;
      }
    };
    const unsigned threads = std::min<unsigned>(thread_cap(config.threads), static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    report.budget_exhausted = budget;
    for (int r = 0; r < n; ++r) {
      if (!done[r]) continue;
      const bool improved = results[r].cost < best - kImprovementEps;
      if (improved) {
        best = results[r].cost;
        incumbent = *results[r].model;
      }
      report.restarts.push_back(record_of(r + 1, 1 + r % config.max_neighborhood_level, results[r], best, improved));
    }
  } else {
    int level = 1;
    for (int r = 1; r < config.restarts; ++r) {
      if (over_budget()) {
        report.budget_exhausted = true;
        break;
      }
      auto cand = run_restart(edges, incumbent, level, finest, derive_seed(config.seed, 1, r));
      const bool improved = cand.cost < best - kImprovementEps;
      if (improved) {
        best = cand.cost;
        incumbent = *cand.model;
      }
      report.restarts.push_back(record_of(r, level, cand, best, improved));
      level = improved ? 1 : (level >= config.max_neighborhood_level ? 1 : level + 1);
    }
  }
  report.best_cost = best;
  return {std::move(incumbent), std::move(report)};
}

void write_search_report(std::ostream& out, const SearchReport& report, char delimiter) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  const char d = delimiter;
  out << "restart" << d << "level" << d << "cost" << d << "best_cost" << d << "merges" << d << "wall_seconds" << d
      << "k_sources" << d << "k_destinations" << d << "k_time" << d << "improved\n";
  for (const auto& r : report.restarts) {
    out << r.index << d << r.level << d << r.cost << d << r.best_cost << d << r.merges << d << r.wall_seconds << d
        << r.k_sources << d << r.k_destinations << d << r.k_time << d << (r.improved ? 1 : 0) << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tricluster
