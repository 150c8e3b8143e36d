#include "tricluster/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "cost_terms.hpp"
#include "tricluster/errors.hpp"

namespace tricluster {

using detail::lf;

double Cost::prior() const {
  double s = 0.0;
  for (const auto& t : prior_terms) s += t.value;
  return s;
}

double Cost::likelihood() const {
  double s = 0.0;
  for (const auto& t : likelihood_terms) s += t.value;
  return s;
}

double Cost::term(const std::string& name) const {
  for (const auto& t : prior_terms) {
    if (t.name == name) return t.value;
  }
  for (const auto& t : likelihood_terms) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("no cost term named '" + name + "'");
}

namespace {

Cost assemble(std::vector<CostTerm> prior, std::vector<CostTerm> likelihood) {
  Cost c{0.0, std::move(prior), std::move(likelihood)};
  c.total = c.prior() + c.likelihood();
  return c;
}

}  // namespace

Cost cost(const Triclustering& model) {
  // The 1x1x1 model uses the closed form so that it agrees with null_cost() bit for bit.
  if (model.k_sources() == 1 && model.k_destinations() == 1 && model.k_time() == 1) return null_cost(model);
  const auto m = model.num_edges();
  const auto n_s = static_cast<std::int64_t>(model.num_sources());
  const auto n_d = static_cast<std::int64_t>(model.num_destinations());
  const std::int64_t ks = model.k_sources();
  const std::int64_t kd = model.k_destinations();
  const std::int64_t kt = model.k_time();

  double source_degrees = 0.0;
  double source_mapping = 0.0;
  for (std::int64_t i = 0; i < ks; ++i) {
    source_degrees += detail::degree_list_term(model.source_marginals()[i], model.source_cluster_sizes()[i]);
    source_mapping += lf(model.source_marginals()[i]);
  }
  for (auto d : model.out_degrees()) source_mapping -= lf(d);

  double destination_degrees = 0.0;
  double destination_mapping = 0.0;
  for (std::int64_t j = 0; j < kd; ++j) {
    destination_degrees +=
        detail::degree_list_term(model.destination_marginals()[j], model.destination_cluster_sizes()[j]);
    destination_mapping += lf(model.destination_marginals()[j]);
  }
  for (auto d : model.in_degrees()) destination_mapping -= lf(d);

  double edge_term = lf(m);
  for (const auto& c : model.cells()) edge_term -= lf(c.count);
  double time_order = 0.0;
  for (auto t : model.time_marginals()) time_order += lf(t);

  return assemble(
      {
          {"log_source_count", std::log(static_cast<double>(n_s))},
          {"log_destination_count", std::log(static_cast<double>(n_d))},
          {"log_edge_count", std::log(static_cast<double>(m))},
          {"source_partition", log_sum_stirling(n_s, ks)},
          {"destination_partition", log_sum_stirling(n_d, kd)},
          {"tricluster_assignment", detail::assignment_term(m, ks * kd * kt)},
          {"source_degrees", source_degrees},
          {"destination_degrees", destination_degrees},
      },
      {
          {"edge_to_tricluster", edge_term},
          {"time_order", time_order},
          {"source_mapping", source_mapping},
          {"destination_mapping", destination_mapping},
      });
}

namespace {

Cost null_cost_from(std::int64_t m, std::span<const std::int64_t> out, std::span<const std::int64_t> in) {
  const auto n_s = static_cast<std::int64_t>(out.size());
  const auto n_d = static_cast<std::int64_t>(in.size());
  double sum_out = 0.0;
  for (auto d : out) sum_out += lf(d);
  double sum_in = 0.0;
  for (auto d : in) sum_in += lf(d);
  return assemble(
      {
          {"log_source_count", std::log(static_cast<double>(n_s))},
          {"log_destination_count", std::log(static_cast<double>(n_d))},
          {"log_edge_count", std::log(static_cast<double>(m))},
          {"source_partition", 0.0},
          {"destination_partition", 0.0},
          {"tricluster_assignment", 0.0},
          {"source_degrees", log_binomial(m + n_s - 1, n_s - 1)},
          {"destination_degrees", log_binomial(m + n_d - 1, n_d - 1)},
      },
      {
          {"edge_to_tricluster", 0.0},
          {"time_order", lf(m)},
          {"source_mapping", lf(m) - sum_out},
          {"destination_mapping", lf(m) - sum_in},
      });
}

}  // namespace

Cost null_cost(const TemporalEdgeList& edges) {
  auto out = edges.out_degrees();
  auto in = edges.in_degrees();
  return null_cost_from(static_cast<std::int64_t>(edges.num_edges()), out, in);
}

Cost null_cost(const Triclustering& model) {
  return null_cost_from(model.num_edges(), model.out_degrees(), model.in_degrees());
}

double merge_delta(const Triclustering& model, Axis axis, std::uint32_t a, std::uint32_t b) {
  const auto k = model.k(axis);
  if (a == b || a >= k || b >= k) throw std::invalid_argument("merge_delta: invalid cluster pair");
  if (a > b) std::swap(a, b);
  if (axis == Axis::Time && b != a + 1) throw OrderingError("merge_delta: time intervals are not adjacent");

  const auto m = model.num_edges();
  // Pair each cell of a with the cell of b sharing the other two coordinates.
  struct Key {
    std::uint32_t x, y;
    std::int64_t count;
    bool from_b;
  };
  std::vector<Key> keys;
  for (const auto& c : model.cells()) {
    std::uint32_t own = axis == Axis::Source ? c.i : axis == Axis::Destination ? c.j : c.l;
    if (own != a && own != b) continue;
    std::uint32_t x = axis == Axis::Source ? c.j : c.i;
    std::uint32_t y = axis == Axis::Time ? c.j : c.l;
    keys.push_back({x, y, c.count, own == b});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& p, const Key& q) {
    return std::tie(p.x, p.y, p.from_b) < std::tie(q.x, q.y, q.from_b);
  });
  double interaction = 0.0;
  for (std::size_t n = 0; n + 1 < keys.size(); ++n) {
    if (keys[n].x == keys[n + 1].x && keys[n].y == keys[n + 1].y) {
      interaction += detail::pair_gain(keys[n].count, keys[n + 1].count);
      ++n;
    }
  }

  const std::int64_t ks = model.k_sources();
  const std::int64_t kd = model.k_destinations();
  const std::int64_t kt = model.k_time();
  switch (axis) {
    case Axis::Source: {
      auto sig = model.source_marginals();
      auto size = model.source_cluster_sizes();
      return detail::vertex_global_delta(static_cast<std::int64_t>(model.num_sources()), ks, kd * kt, m) +
             detail::vertex_local_base(sig[a], size[a], sig[b], size[b]) - interaction;
    }
    case Axis::Destination: {
      auto sig = model.destination_marginals();
      auto size = model.destination_cluster_sizes();
      return detail::vertex_global_delta(static_cast<std::int64_t>(model.num_destinations()), kd, ks * kt, m) +
             detail::vertex_local_base(sig[a], size[a], sig[b], size[b]) - interaction;
    }
    case Axis::Time: {
      auto tau = model.time_marginals();
      return detail::time_global_delta(kt, ks * kd, m) + detail::pair_gain(tau[a], tau[b]) - interaction;
    }
  }
  return 0.0;
}

Informativity informativity(double cost_model, double cost_star, double cost_null) {
  const double span = cost_star - cost_null;
  if (span == 0.0) return {0.0, true};
  const double gain = cost_model - cost_null;
  return {gain == 0.0 ? 0.0 : gain / span, false};
}

void write_cost_breakdown(std::ostream& out, const Cost& c, char delimiter) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "term" << delimiter << "value\n";
  for (const auto& t : c.prior_terms) out << t.name << delimiter << t.value << '\n';
  for (const auto& t : c.likelihood_terms) out << t.name << delimiter << t.value << '\n';
  out << "prior" << delimiter << c.prior() << '\n';
  out << "likelihood" << delimiter << c.likelihood() << '\n';
  out << "total" << delimiter << c.total << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tricluster
