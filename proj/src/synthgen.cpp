#include "tricluster/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "tricluster/random.hpp"

namespace tricluster {

namespace {
constexpr std::uint64_t kStreamGenerate = 10;
constexpr std::uint64_t kStreamShuffle = 11;
constexpr std::uint64_t kStreamNoise = 12;

std::vector<std::string> make_ids(char prefix, std::uint32_t n) {
  std::vector<std::string> ids(n);
  for (std::uint32_t v = 0; v < n; ++v) ids[v] = prefix + std::to_string(v);
  return ids;
}

std::uint32_t generator_index(const std::string& id) {
  std::uint32_t v = 0;
  std::from_chars(id.data() + 1, id.data() + id.size(), v);
  return v;
}
}  // namespace

GeneratorMode parse_generator_mode(const std::string& name) {
  if (name == "temporal") return GeneratorMode::Temporal;
  if (name == "shuffled") return GeneratorMode::Shuffled;
  if (name == "erdos_renyi") return GeneratorMode::ErdosRenyi;
  throw std::invalid_argument("unknown generator mode '" + name + "'");
}

const char* generator_mode_name(GeneratorMode mode) noexcept {
  switch (mode) {
    case GeneratorMode::Temporal: return "temporal";
    case GeneratorMode::Shuffled: return "shuffled";
    case GeneratorMode::ErdosRenyi: return "erdos_renyi";
  }
  return "?";
}

std::vector<double> theta(double t, int k) {
  if (k < 1) throw std::invalid_argument("theta: k must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("theta: t must lie in [0, 1]");
  if (k == 1) return {1.0};
  const double diag = (0.9 * t + 0.1 * (1.0 - t)) / k;
  const double off = (0.1 * t + 0.9 * (1.0 - t)) / (static_cast<double>(k) * (k - 1));
  std::vector<double> out(static_cast<std::size_t>(k) * k, off);
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i) * k + i] = diag;
  return out;
}

std::uint32_t balanced_cluster(std::uint32_t v, std::uint32_t n, int k) {
  const std::uint32_t base = n / k;
  const std::uint32_t rem = n % k;
  const std::uint32_t big = rem * (base + 1);
  if (v < big) return v / (base + 1);
  return rem + (v - big) / base;
}

namespace {

// First vertex of each balanced cluster, plus n at the end.
std::vector<std::uint32_t> block_starts(std::uint32_t n, int k) {
  std::vector<std::uint32_t> starts(k + 1, 0);
  for (int c = 0; c < k; ++c) {
    starts[c + 1] = starts[c] + n / k + (static_cast<std::uint32_t>(c) < n % k ? 1 : 0);
  }
  return starts;
}

}  // namespace

GeneratedData generate(const GeneratorConfig& config) {
  if (config.k < 1 || config.n_sources < static_cast<std::uint32_t>(config.k) ||
      config.n_destinations < static_cast<std::uint32_t>(config.k) || config.m < 1) {
    throw std::invalid_argument("generate: need k >= 1, vertex counts >= k and m >= 1");
  }
  if (!(config.noise_fraction >= 0.0 && config.noise_fraction <= 1.0)) {
    throw std::invalid_argument("generate: noise fraction must lie in [0, 1]");
  }
  const auto sids = make_ids('s', config.n_sources);
  const auto dids = make_ids('d', config.n_destinations);

  std::optional<TemporalEdgeList> edges;
  if (config.mode == GeneratorMode::ErdosRenyi) {
    edges = erdos_renyi_temporal(config.n_sources, config.n_destinations, config.m,
                                 derive_seed(config.seed, kStreamGenerate));
  } else {
    Rng rng(derive_seed(config.seed, kStreamGenerate));
    const int k = config.k;
    const auto s_start = block_starts(config.n_sources, k);
    const auto d_start = block_starts(config.n_destinations, k);
    std::vector<std::uint32_t> src(config.m), dst(config.m);
    std::vector<double> times(config.m);
    for (std::uint64_t n = 0; n < config.m; ++n) {
      const double t = uniform_unit(rng);
      std::uint32_t u = 0, w = 0;
      if (k > 1) {
        // Diagonal mass k*theta_ii = 0.9t + 0.1(1-t); cells within each block are equiprobable.
        const double diag_mass = 0.9 * t + 0.1 * (1.0 - t);
        if (uniform_unit(rng) < diag_mass) {
          u = w = static_cast<std::uint32_t>(uniform_below(rng, k));
        } else {
          const auto cell = uniform_below(rng, static_cast<std::uint64_t>(k) * (k - 1));
          u = static_cast<std::uint32_t>(cell / (k - 1));
          w = static_cast<std::uint32_t>(cell % (k - 1));
          if (w >= u) ++w;
        }
      }
      src[n] = s_start[u] + static_cast<std::uint32_t>(uniform_below(rng, s_start[u + 1] - s_start[u]));
      dst[n] = d_start[w] + static_cast<std::uint32_t>(uniform_below(rng, d_start[w + 1] - d_start[w]));
      times[n] = t;
    }
    edges = TemporalEdgeList::from_indices(sids, dids, std::move(src), std::move(dst), std::move(times));
    if (config.mode == GeneratorMode::Shuffled) {
      edges = shuffle_time(*edges, derive_seed(config.seed, kStreamShuffle));
    }
  }
  if (config.noise_fraction > 0.0) {
    edges = reallocate(*edges, config.noise_fraction, derive_seed(config.seed, kStreamNoise));
  }

  GeneratedData out{std::move(*edges), {}, {}};
  for (const auto& id : out.edges.source_ids()) {
    out.source_truth.push_back(balanced_cluster(generator_index(id), config.n_sources, config.k));
  }
  for (const auto& id : out.edges.destination_ids()) {
    out.destination_truth.push_back(balanced_cluster(generator_index(id), config.n_destinations, config.k));
  }
  return out;
}

TemporalEdgeList reallocate(const TemporalEdgeList& edges, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("reallocate: fraction must lie in [0, 1]");
  const auto m = edges.num_edges();
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m)));
  if (count == 0) return edges;

  std::vector<std::uint32_t> src(edges.sources().begin(), edges.sources().end());
  std::vector<std::uint32_t> dst(edges.destinations().begin(), edges.destinations().end());
  std::vector<double> times;
  if (edges.has_raw_times()) {
    times.assign(edges.raw_times().begin(), edges.raw_times().end());
  } else {
    for (auto r : edges.time_ranks()) times.push_back((r - 0.5) / static_cast<double>(m));
  }
  const double lo = std::min(0.0, *std::min_element(times.begin(), times.end()));
  const double hi = std::max(1.0, *std::max_element(times.begin(), times.end()));

  Rng rng(seed);
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t c = 0; c < count; ++c) {
    std::swap(order[c], order[c + uniform_below(rng, m - c)]);
    const auto e = order[c];
    src[e] = static_cast<std::uint32_t>(uniform_below(rng, edges.num_sources()));
    dst[e] = static_cast<std::uint32_t>(uniform_below(rng, edges.num_destinations()));
    times[e] = lo + (hi - lo) * uniform_unit(rng);
  }
  return TemporalEdgeList::from_indices(edges.source_ids(), edges.destination_ids(), std::move(src),
                                        std::move(dst), std::move(times));
}

TemporalEdgeList shuffle_time(const TemporalEdgeList& edges, std::uint64_t seed) {
  const auto m = edges.num_edges();
  std::vector<std::uint32_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(seed);
  shuffle_range(perm.begin(), perm.end(), rng);
  std::vector<std::uint32_t> ranks(m);
  std::vector<double> times;
  if (edges.has_raw_times()) times.resize(m);
  for (std::size_t n = 0; n < m; ++n) {
    ranks[n] = edges.time_ranks()[perm[n]];
    if (!times.empty()) times[n] = edges.raw_times()[perm[n]];
  }
  return TemporalEdgeList::from_indices(edges.source_ids(), edges.destination_ids(),
                                        {edges.sources().begin(), edges.sources().end()},
                                        {edges.destinations().begin(), edges.destinations().end()},
                                        std::move(times), std::move(ranks), true);
}

TemporalEdgeList erdos_renyi_temporal(std::uint32_t n_sources, std::uint32_t n_destinations, std::uint64_t m,
                                      std::uint64_t seed) {
  if (n_sources < 1 || n_destinations < 1 || m < 1) {
    throw std::invalid_argument("erdos_renyi_temporal: sizes must be >= 1");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> src(m), dst(m);
  std::vector<double> times(m);
  for (std::uint64_t n = 0; n < m; ++n) {
    src[n] = static_cast<std::uint32_t>(uniform_below(rng, n_sources));
    dst[n] = static_cast<std::uint32_t>(uniform_below(rng, n_destinations));
    times[n] = uniform_unit(rng);
  }
  return TemporalEdgeList::from_indices(make_ids('s', n_sources), make_ids('d', n_destinations), std::move(src),
                                        std::move(dst), std::move(times));
}

TemporalEdgeList sample_from_model(const Triclustering& model, std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<std::size_t>(model.num_edges());

  // Edge -> tricluster, uniform over assignments matching the counts.
  std::vector<std::uint32_t> cell_of(m);
  {
    std::size_t n = 0;
    for (std::uint32_t c = 0; c < model.cells().size(); ++c) {
      for (std::int64_t x = 0; x < model.cells()[c].count; ++x) cell_of[n++] = c;
    }
    shuffle_range(cell_of.begin(), cell_of.end(), rng);
  }

  // Edges of each vertex cluster receive that cluster's vertices, each repeated by its degree.
  auto map_vertices = [&](std::span<const std::uint32_t> partition, std::span<const std::int64_t> degrees,
                          std::uint32_t k, auto cluster_of_cell) {
    std::vector<std::vector<std::uint32_t>> pool(k);
    for (std::uint32_t v = 0; v < partition.size(); ++v) {
      for (std::int64_t x = 0; x < degrees[v]; ++x) pool[partition[v]].push_back(v);
    }
    for (auto& p : pool) shuffle_range(p.begin(), p.end(), rng);
    std::vector<std::size_t> used(k, 0);
    std::vector<std::uint32_t> out(m);
    for (std::size_t n = 0; n < m; ++n) {
      const auto c = cluster_of_cell(model.cells()[cell_of[n]]);
      out[n] = pool[c][used[c]++];
    }
    return out;
  };
  auto src = map_vertices(model.source_partition(), model.out_degrees(), model.k_sources(),
                          [](const Cell& c) { return c.i; });
  auto dst = map_vertices(model.destination_partition(), model.in_degrees(), model.k_destinations(),
                          [](const Cell& c) { return c.j; });

  // Uniform order of the edges inside each interval.
  std::vector<std::vector<std::uint32_t>> rank_pool(model.k_time());
  auto b = model.time_boundaries();
  for (std::uint32_t l = 0; l < model.k_time(); ++l) {
    for (auto r = b[l] + 1; r <= b[l + 1]; ++r) rank_pool[l].push_back(r);
    shuffle_range(rank_pool[l].begin(), rank_pool[l].end(), rng);
  }
  std::vector<std::size_t> used(model.k_time(), 0);
  std::vector<std::uint32_t> ranks(m);
  for (std::size_t n = 0; n < m; ++n) {
    const auto l = model.cells()[cell_of[n]].l;
    ranks[n] = rank_pool[l][used[l]++];
  }
  std::vector<double> times;
  if (model.times_by_rank() && !model.times_by_rank()->empty()) {
    times.resize(m);
    for (std::size_t n = 0; n < m; ++n) times[n] = (*model.times_by_rank())[ranks[n] - 1];
  }
  return TemporalEdgeList::from_indices(model.source_ids(), model.destination_ids(), std::move(src),
                                        std::move(dst), std::move(times), std::move(ranks), true);
}

double recovery_score(std::span<const std::uint32_t> found, std::span<const std::uint32_t> truth) {
  if (found.size() != truth.size()) throw std::invalid_argument("recovery_score: labellings cover different universes");
  const auto n = found.size();
  if (n < 2) return 1.0;
  std::uint32_t kf = 0, kt = 0;
  for (auto c : found) kf = std::max(kf, c + 1);
  for (auto c : truth) kt = std::max(kt, c + 1);
  std::vector<std::int64_t> table(static_cast<std::size_t>(kf) * kt, 0), a(kf, 0), b(kt, 0);
  for (std::size_t v = 0; v < n; ++v) {
    ++table[static_cast<std::size_t>(found[v]) * kt + truth[v]];
    ++a[found[v]];
    ++b[truth[v]];
  }
  auto pairs = [](std::int64_t x) { return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (auto x : table) index += pairs(x);
  for (auto x : a) sum_a += pairs(x);
  for (auto x : b) sum_b += pairs(x);
  const double expected = sum_a * sum_b / pairs(static_cast<std::int64_t>(n));
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return index == maximum ? 1.0 : 0.0;
  return (index - expected) / (maximum - expected);
}

void write_truth(std::ostream& out, const std::vector<std::string>& ids, std::span<const std::uint32_t> truth,
                 char delimiter) {
  for (std::size_t v = 0; v < ids.size(); ++v) out << ids[v] << delimiter << truth[v] << '\n';
}

}  // namespace tricluster
