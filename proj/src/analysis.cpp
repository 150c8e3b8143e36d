#include "tricluster/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "tricluster/criterion.hpp"
#include "tricluster/errors.hpp"

namespace tricluster {

ClusterDistributions cluster_distributions(const Triclustering& model) {
  ClusterDistributions d;
  const double m = static_cast<double>(model.num_edges());
  d.k_sources = model.k_sources();
  d.k_destinations = model.k_destinations();
  d.k_time = model.k_time();
  for (auto x : model.source_marginals()) d.source.push_back(x / m);
  for (auto x : model.destination_marginals()) d.destination.push_back(x / m);
  for (auto x : model.time_marginals()) d.time.push_back(x / m);
  std::vector<std::int64_t> pair(std::size_t(d.k_sources) * d.k_destinations, 0);
  for (const auto& c : model.cells()) {
    pair[std::size_t(c.i) * d.k_destinations + c.j] += c.count;
    d.joint.push_back({c.i, c.j, c.l, c.count / m});
  }
  for (auto x : pair) d.source_destination.push_back(x / m);
  return d;
}

namespace {
double term(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }
}  // namespace

PairContributions mi_source_dest(const Triclustering& model) {
  const auto d = cluster_distributions(model);
  PairContributions out;
  out.k_sources = d.k_sources;
  out.k_destinations = d.k_destinations;
  out.values.resize(d.source_destination.size());
  for (std::uint32_t i = 0; i < d.k_sources; ++i) {
    for (std::uint32_t j = 0; j < d.k_destinations; ++j) {
      const double v = term(d.pair(i, j), d.source[i] * d.destination[j]);
      out.values[std::size_t(i) * d.k_destinations + j] = v;
      out.total += v;
    }
  }
  return out;
}

double PairTimeContributions::at(std::uint32_t i, std::uint32_t j, std::uint32_t l) const {
  auto it = std::lower_bound(values.begin(), values.end(), std::tuple{i, j, l},
                             [](const TimeContribution& c, const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& k) {
                               return std::tie(c.i, c.j, c.l) < k;
                             });
  if (it != values.end() && it->i == i && it->j == j && it->l == l) return it->value;
  return 0.0;
}

PairTimeContributions mi_pair_time(const Triclustering& model) {
  const auto d = cluster_distributions(model);
  PairTimeContributions out;
  for (const auto& c : d.joint) {
    const double v = term(c.p, d.pair(c.i, c.j) * d.time[c.l]);
    out.values.push_back({c.i, c.j, c.l, v});
    out.total += v;
  }
  std::sort(out.values.begin(), out.values.end(), [](const TimeContribution& a, const TimeContribution& b) {
    return std::tie(a.i, a.j, a.l) < std::tie(b.i, b.j, b.l);
  });
  return out;
}

double js_divergence(std::span<const double> p, std::span<const double> q, double alpha_p, double alpha_q) {
  if (p.size() != q.size()) throw DimensionError("js_divergence: distributions have different supports");
  if (!(alpha_p >= 0.0 && alpha_q >= 0.0) || std::abs(alpha_p + alpha_q - 1.0) > 1e-12) {
    throw std::invalid_argument("js_divergence: weights must be non-negative and sum to 1");
  }
  double js = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    const double mix = alpha_p * p[x] + alpha_q * q[x];
    if (alpha_p > 0.0) js += alpha_p * term(p[x], mix);
    if (alpha_q > 0.0) js += alpha_q * term(q[x], mix);
  }
  return std::max(js, 0.0);
}

std::vector<double> cluster_profile(const Triclustering& model, Axis axis, std::uint32_t c) {
  if (c >= model.k(axis)) throw std::out_of_range("cluster_profile: no such cluster");
  const auto marginal = static_cast<double>(model.marginals(axis)[c]);
  std::vector<double> profile;
  auto index = [&](const Cell& cell) -> std::size_t {
    switch (axis) {
      case Axis::Source: return std::size_t(cell.j) * model.k_time() + cell.l;
      case Axis::Destination: return std::size_t(cell.i) * model.k_time() + cell.l;
      case Axis::Time: return std::size_t(cell.i) * model.k_destinations() + cell.j;
    }
    return 0;
  };
  auto own = [&](const Cell& cell) {
    return axis == Axis::Source ? cell.i : axis == Axis::Destination ? cell.j : cell.l;
  };
  const std::size_t size = axis == Axis::Source        ? std::size_t(model.k_destinations()) * model.k_time()
                           : axis == Axis::Destination ? std::size_t(model.k_sources()) * model.k_time()
                                                       : std::size_t(model.k_sources()) * model.k_destinations();
  profile.assign(size, 0.0);
  for (const auto& cell : model.cells()) {
    if (own(cell) == c) profile[index(cell)] += cell.count / marginal;
  }
  return profile;
}

double DissimilarityCheck::relative_gap() const {
  return limit > 0.0 ? std::abs(empirical - limit) / limit : std::abs(empirical - limit);
}

DissimilarityCheck asymptotic_dissimilarity_check(const Triclustering& model, Axis axis, std::uint32_t a,
                                                  std::uint32_t b) {
  if (a == b) throw std::invalid_argument("asymptotic_dissimilarity_check: clusters must differ");
  const double m = static_cast<double>(model.num_edges());
  DissimilarityCheck out;
  out.empirical = merge_delta(model, axis, a, b) / m;
  const double pa = model.marginals(axis)[a] / m;
  const double pb = model.marginals(axis)[b] / m;
  out.alpha_a = pa / (pa + pb);
  out.alpha_b = pb / (pa + pb);
  const auto qa = cluster_profile(model, axis, a);
  const auto qb = cluster_profile(model, axis, b);
  out.limit = (pa + pb) * js_divergence(qa, qb, out.alpha_a, 1.0 - out.alpha_a);
  return out;
}

namespace {
const char* sign_of(double v) { return v > 0.0 ? "+" : v < 0.0 ? "-" : "0"; }
}  // namespace

void write_pair_contributions(std::ostream& out, const PairContributions& c, bool bits, char delimiter) {
  const double scale = bits ? 1.0 / std::numbers::ln2 : 1.0;
  out << std::setprecision(17);
  out << "source_cluster" << delimiter << "destination_cluster" << delimiter << "contribution" << delimiter
      << "sign\n";
  for (std::uint32_t i = 0; i < c.k_sources; ++i) {
    for (std::uint32_t j = 0; j < c.k_destinations; ++j) {
      const double v = c.at(i, j) * scale;
      out << i << delimiter << j << delimiter << v << delimiter << sign_of(v) << '\n';
    }
  }
}

void write_pair_time_contributions(std::ostream& out, const PairTimeContributions& c, bool bits,
                                   char delimiter) {
  const double scale = bits ? 1.0 / std::numbers::ln2 : 1.0;
  out << std::setprecision(17);
  out << "source_cluster" << delimiter << "destination_cluster" << delimiter << "time_cluster" << delimiter
      << "contribution" << delimiter << "sign\n";
  for (const auto& v : c.values) {
    const double x = v.value * scale;
    out << v.i << delimiter << v.j << delimiter << v.l << delimiter << x << delimiter << sign_of(x) << '\n';
  }
}

}  // namespace tricluster
