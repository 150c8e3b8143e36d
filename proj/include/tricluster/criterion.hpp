#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tricluster/edge_list.hpp"
#include "tricluster/triclustering.hpp"

namespace tricluster {

struct CostTerm {
  std::string name;
  double value = 0.0;
};

/// Value of the MAP criterion (nats) with its term-by-term breakdown.
///
/// Prior terms: log_source_count, log_destination_count, log_edge_count,
/// source_partition, destination_partition, tricluster_assignment,
/// source_degrees, destination_degrees.
/// Likelihood terms: edge_to_tricluster, time_order, source_mapping,
/// destination_mapping.
struct Cost {
  double total = 0.0;
  std::vector<CostTerm> prior_terms;
  std::vector<CostTerm> likelihood_terms;

  double prior() const;
  double likelihood() const;
  double term(const std::string& name) const;
};

/// Exact criterion value of a triclustering. The vertex universes and m are
/// taken from the model itself.
Cost cost(const Triclustering& model);

/// Cost of the 1x1x1 model, evaluated in closed form from degrees alone.
Cost null_cost(const TemporalEdgeList& edges);
Cost null_cost(const Triclustering& model);

/// c(M with a and b merged) - c(M), evaluated from the cells of a and b only.
/// Time merges require adjacent intervals (OrderingError otherwise).
double merge_delta(const Triclustering& model, Axis axis, std::uint32_t a, std::uint32_t b);

struct Informativity {
  double value = 0.0;
  bool undefined = false;  // best model is no better than the null model
};

/// (cost_model - cost_null) / (cost_star - cost_null). Returns 0 with the
/// undefined flag when cost_star == cost_null.
Informativity informativity(double cost_model, double cost_star, double cost_null);

/// One "name<d>value" row per term, then the prior, likelihood and total rows.
void write_cost_breakdown(std::ostream& out, const Cost& c, char delimiter = '\t');

}  // namespace tricluster
