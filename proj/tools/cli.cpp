#include "cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tricluster/analysis.hpp"
#include "tricluster/coarsen.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/edge_list.hpp"
#include "tricluster/errors.hpp"
#include "tricluster/io.hpp"
#include "tricluster/optimizer.hpp"
#include "tricluster/synthgen.hpp"

namespace tricluster::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Collects what a command read and wrote for its manifest.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args) : command_(std::move(command)), args_(std::move(args)) {
    start_ = std::chrono::steady_clock::now();
  }
  json config = json::object();

  void input(const fs::path& p) { inputs_.push_back({{"path", p.string()}, {"digest", file_digest(p)}}); }
  void output(const fs::path& p, bool deterministic = true) {
    outputs_.push_back({{"path", p.string()}, {"digest", file_digest(p)}, {"deterministic", deterministic}});
  }
  void write(const fs::path& dir) const {
    json doc;
    doc["schema"] = kManifestSchema;
    doc["version"] = kVersion;
    doc["command"] = command_;
    doc["argv"] = args_;
    doc["config"] = config;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    doc["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream f(dir / "manifest.json");
    f << doc.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  json inputs_ = json::array();
  json outputs_ = json::array();
  std::chrono::steady_clock::time_point start_;
};

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw InputError("cannot write " + p.string());
  f << std::setprecision(17);
  return f;
}

TemporalEdgeList load_edges(const std::string& path, const std::string& format) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read input file '" + path + "'");
  return read_edge_file(path, parse_delimiter(format));
}

ModelDocument load_model(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read model file '" + path + "'");
  return read_model_file(path);
}

std::optional<std::uint32_t> parse_granularity(const std::string& text, std::size_t m) {
  if (text == "auto") return std::nullopt;
  if (text == "full") return static_cast<std::uint32_t>(m);
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v >= 1) return static_cast<std::uint32_t>(v);
  } catch (const std::exception&) {
  }
  throw UsageError("--granularity must be 'auto', 'full' or a positive integer");
}

std::array<std::uint32_t, 3> parse_clusters(const std::string& text) {
  std::array<std::uint32_t, 3> out{};
  std::stringstream s(text);
  std::string part;
  int n = 0;
  while (std::getline(s, part, ',')) {
    if (n == 3) throw UsageError("--clusters takes three counts kS,kD,kT");
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v < 0) throw UsageError("bad count");
      out[n++] = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      throw UsageError("--clusters takes three non-negative counts kS,kD,kT");
    }
  }
  if (n != 3) throw UsageError("--clusters takes three counts kS,kD,kT");
  return out;
}

char output_delimiter(const std::string& format) {
  if (format == "tab") return '\t';
  if (format == "comma" || format == "auto") return ',';
  throw UsageError("--format must be auto, comma or tab");
}

struct Options {
  std::string input, output, model, reference, format = "auto";
  std::uint64_t seed = 0;
  int restarts = 16, level = 3;
  std::string granularity = "auto";
  std::optional<double> time_budget;
  bool parallel = false;
  std::optional<double> tau;
  std::optional<std::string> clusters;
  std::vector<std::size_t> checkpoints;
  bool verify_replay = false;
  bool bits = false;
  std::string mode = "temporal";
  int k = 5;
  std::uint32_t ns = 50, nd = 50;
  std::uint64_t m = 1024;
  double noise = 0.0;
};

int cmd_fit(const Options& o, Manifest& manifest, std::ostream& out) {
  const auto edges = load_edges(o.input, o.format);
  manifest.input(o.input);
  SearchConfig config;
  config.restarts = o.restarts;
  config.max_neighborhood_level = o.level;
  config.seed = o.seed;
  config.initial_time_granularity = parse_granularity(o.granularity, edges.num_edges());
  config.time_budget_seconds = o.time_budget;
  config.parallel_restarts = o.parallel;
  manifest.config = {{"restarts", o.restarts},   {"max_neighborhood_level", o.level}, {"seed", o.seed},
                     {"granularity", o.granularity}, {"parallel_restarts", o.parallel}, {"format", o.format}};
  if (o.time_budget) manifest.config["time_budget_seconds"] = *o.time_budget;

  auto fit = vns_fit(edges, config);
  const auto dir = prepare_dir(o.output);
  const double c = fit.report.best_cost;
  {
    auto f = open_out(dir / "model.json");
    write_model_json(f, fit.model, c);
  }
  {
    auto f = open_out(dir / "costs.tsv");
    write_cost_breakdown(f, cost(fit.model));
    f << "null_model\t" << fit.report.null_cost << '\n';
  }
  {
    auto f = open_out(dir / "search_report.tsv");
    write_search_report(f, fit.report);
  }
  manifest.output(dir / "model.json");
  manifest.output(dir / "costs.tsv");
  manifest.output(dir / "search_report.tsv", false);
  out << std::setprecision(17) << "k_sources\t" << fit.model.k_sources() << "\nk_destinations\t"
      << fit.model.k_destinations() << "\nk_time\t" << fit.model.k_time() << "\ncost\t" << c << "\nnull_cost\t"
      << fit.report.null_cost << '\n';
  if (fit.report.budget_exhausted) out << "budget_exhausted\t1\n";
  manifest.write(dir);
  return kOk;
}

int cmd_coarsen(const Options& o, Manifest& manifest, std::ostream& out) {
  if (o.tau && o.clusters) throw UsageError("--tau and --clusters are mutually exclusive");
  StopRule rule;
  if (o.tau) {
    if (!(*o.tau >= 0.0 && *o.tau <= 1.0)) throw UsageError("--tau must lie in [0, 1]");
    rule.tau_min = *o.tau;
  }
  if (o.clusters) rule.target = parse_clusters(*o.clusters);
  const auto doc = load_model(o.model);
  manifest.input(o.model);
  manifest.config = {{"tau", rule.tau_min}, {"clusters", rule.target}, {"checkpoints", o.checkpoints}};

  const auto hierarchy = agglomerate(doc.model, rule);
  for (auto step : o.checkpoints) {
    if (step > hierarchy.steps()) throw UsageError("checkpoint " + std::to_string(step) + " is beyond the last merge");
  }
  const auto dir = prepare_dir(o.output);
  {
    auto f = open_out(dir / "hierarchy.json");
    write_hierarchy_json(f, hierarchy, o.checkpoints);
  }
  {
    auto f = open_out(dir / "dendrogram.txt");
    write_dendrogram(f, hierarchy);
  }
  double baseline = hierarchy.start_cost();
  for (const auto& r : hierarchy.records()) {
    if (r.baseline_reset) baseline = r.cost_after;
  }
  const auto final_model = hierarchy.replay(hierarchy.steps());
  {
    auto f = open_out(dir / "coarsened_model.json");
    write_model_json(f, final_model, baseline);
  }
  manifest.output(dir / "hierarchy.json");
  manifest.output(dir / "dendrogram.txt");
  manifest.output(dir / "coarsened_model.json");
  for (auto step : o.checkpoints) {
    const auto path = dir / ("checkpoint_" + std::to_string(step) + ".json");
    auto f = open_out(path);
    write_model_json(f, hierarchy.replay(step), hierarchy.start_cost());
    f.close();
    manifest.output(path);
  }
  out << std::setprecision(17) << "merges\t" << hierarchy.steps() << "\nk_sources\t" << final_model.k_sources()
      << "\nk_destinations\t" << final_model.k_destinations() << "\nk_time\t" << final_model.k_time() << '\n';
  if (!hierarchy.records().empty()) out << "tau\t" << hierarchy.records().back().tau_after << '\n';
  if (o.verify_replay) {
    const double e = hierarchy.replay_error();
    out << "replay_error\t" << e << '\n';
    if (e > 1e-6) {
      manifest.write(dir);
      return kFailure;
    }
  }
  manifest.write(dir);
  return kOk;
}

void require_compatible(const TemporalEdgeList& edges, const Triclustering& model) {
  const auto issue = compatibility_issue(edges, model);
  if (!issue.empty()) throw CompatibilityError("model is not compatible with the data: " + issue);
}

int cmd_analyze(const Options& o, Manifest& manifest, std::ostream& out) {
  const auto doc = load_model(o.model);
  const auto edges = load_edges(o.input, o.format);
  manifest.input(o.model);
  manifest.input(o.input);
  manifest.config = {{"bits", o.bits}, {"format", o.format}};
  require_compatible(edges, doc.model);
  const auto pairs = mi_source_dest(doc.model);
  const auto triples = mi_pair_time(doc.model);
  const auto dir = prepare_dir(o.output);
  {
    auto f = open_out(dir / "mi_source_dest.tsv");
    write_pair_contributions(f, pairs, o.bits);
  }
  {
    auto f = open_out(dir / "mi_pair_time.tsv");
    write_pair_time_contributions(f, triples, o.bits);
  }
  const double scale = o.bits ? 1.0 / std::log(2.0) : 1.0;
  {
    auto f = open_out(dir / "mi_totals.tsv");
    f << "table\ttotal\n";
    f << "source_dest\t" << pairs.total * scale << "\npair_time\t" << triples.total * scale << '\n';
  }
  manifest.output(dir / "mi_source_dest.tsv");
  manifest.output(dir / "mi_pair_time.tsv");
  manifest.output(dir / "mi_totals.tsv");
  out << std::setprecision(17) << "mi_source_dest\t" << pairs.total * scale << "\nmi_pair_time\t"
      << triples.total * scale << '\n';
  manifest.write(dir);
  return kOk;
}

int cmd_generate(const Options& o, Manifest& manifest, std::ostream& out) {
  GeneratorConfig g;
  try {
    g.mode = parse_generator_mode(o.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  g.k = o.k;
  g.n_sources = o.ns;
  g.n_destinations = o.nd;
  g.m = o.m;
  g.seed = o.seed;
  g.noise_fraction = o.noise;
  const char delim = output_delimiter(o.format);
  manifest.config = {{"mode", o.mode}, {"k", o.k},         {"ns", o.ns},         {"nd", o.nd},
                     {"m", o.m},       {"noise", o.noise}, {"seed", o.seed},     {"format", o.format}};
  GeneratedData data = [&] {
    try {
      return generate(g);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const auto dir = prepare_dir(o.output);
  const auto edges_path = dir / (delim == '\t' ? "edges.tsv" : "edges.csv");
  {
    auto f = open_out(edges_path);
    write_edges(f, data.edges, delim);
  }
  {
    auto f = open_out(dir / "source_truth.tsv");
    write_truth(f, data.edges.source_ids(), data.source_truth);
  }
  {
    auto f = open_out(dir / "destination_truth.tsv");
    write_truth(f, data.edges.destination_ids(), data.destination_truth);
  }
  manifest.output(edges_path);
  manifest.output(dir / "source_truth.tsv");
  manifest.output(dir / "destination_truth.tsv");
  out << "edges\t" << data.edges.num_edges() << "\nsources\t" << data.edges.num_sources() << "\ndestinations\t"
      << data.edges.num_destinations() << '\n';
  manifest.write(dir);
  return kOk;
}

int cmd_eval(const Options& o, Manifest& manifest, std::ostream& out) {
  const auto doc = load_model(o.model);
  const auto edges = load_edges(o.input, o.format);
  manifest.input(o.model);
  manifest.input(o.input);
  require_compatible(edges, doc.model);
  std::optional<double> reference = doc.reference_cost;
  if (!o.reference.empty()) {
    const auto ref = load_model(o.reference);
    manifest.input(o.reference);
    require_compatible(edges, ref.model);
    reference = cost(ref.model).total;
  }
  const auto c = cost(doc.model);
  const double c_null = null_cost(edges).total;
  const auto tau = informativity(c.total, reference.value_or(c.total), c_null);

  std::ostringstream report;
  report << std::setprecision(17);
  write_cost_breakdown(report, c);
  report << "null_model\t" << c_null << '\n';
  report << "reference\t" << reference.value_or(c.total) << '\n';
  report << "informativity\t";
  if (tau.undefined) {
    report << "undefined\n";
  } else {
    report << tau.value << '\n';
  }
  out << report.str();
  if (!o.output.empty()) {
    const auto dir = prepare_dir(o.output);
    {
      auto f = open_out(dir / "eval.tsv");
      f << report.str();
    }
    manifest.output(dir / "eval.tsv");
    manifest.write(dir);
  }
  return kOk;
}

int cmd_rerun(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  json doc;
  {
    std::ifstream f(manifest_path);
    if (!f) throw InputError("cannot read manifest '" + manifest_path + "'");
    try {
      doc = json::parse(f);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("malformed manifest: ") + e.what());
    }
  }
  if (doc.value("schema", "") != kManifestSchema) throw InputError("unsupported manifest schema");
  for (const auto& in : doc.at("inputs")) {
    const auto path = in.at("path").get<std::string>();
    if (!fs::is_regular_file(path) || file_digest(path) != in.at("digest").get<std::string>()) {
      throw InputError("input '" + path + "' is missing or changed since the recorded run");
    }
  }
  const auto args = doc.at("argv").get<std::vector<std::string>>();
  std::vector<const char*> argv{"tricluster"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  const int code = run(static_cast<int>(argv.size()), argv.data(), sink, err);
  if (code != kOk) return code;
  int mismatches = 0;
  for (const auto& o : doc.at("outputs")) {
    if (!o.at("deterministic").get<bool>()) continue;
    const auto path = o.at("path").get<std::string>();
    const bool same = fs::is_regular_file(path) && file_digest(path) == o.at("digest").get<std::string>();
    out << (same ? "identical\t" : "differs\t") << path << '\n';
    if (!same) ++mismatches;
  }
  return mismatches == 0 ? kOk : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Triclustering of temporal graphs"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "Fit a triclustering to an edge list");
  fit->add_option("--input", o.input, "Edge list (src,dst,time)")->required();
  fit->add_option("--output", o.output, "Output directory")->required();
  fit->add_option("--seed", o.seed, "Random seed");
  fit->add_option("--restarts", o.restarts, "Search restarts")->check(CLI::PositiveNumber);
  fit->add_option("--level", o.level, "Largest perturbation level")->check(CLI::PositiveNumber);
  fit->add_option("--granularity", o.granularity, "Initial intervals: auto, full or a count");
  fit->add_option("--time-budget", o.time_budget, "Seconds allowed for the search")->check(CLI::PositiveNumber);
  fit->add_flag("--parallel", o.parallel, "Run restarts in parallel");
  fit->add_option("--format", o.format, "Input delimiter: auto, comma or tab");

  auto* coarsen = app.add_subcommand("coarsen", "Merge clusters of a fitted model into a hierarchy");
  coarsen->add_option("--model", o.model, "Model document")->required();
  coarsen->add_option("--output", o.output, "Output directory")->required();
  coarsen->add_option("--tau", o.tau, "Smallest informativity to keep");
  coarsen->add_option("--clusters", o.clusters, "Target counts kS,kD,kT (0 leaves an axis free)");
  coarsen->add_option("--checkpoint", o.checkpoints, "Also write the model after this many merges");
  coarsen->add_flag("--verify-replay", o.verify_replay, "Recompute the cost of every step");

  auto* analyze = app.add_subcommand("analyze", "Mutual-information contributions of a model");
  analyze->add_option("--model", o.model, "Model document")->required();
  analyze->add_option("--input", o.input, "Edge list the model was fitted on")->required();
  analyze->add_option("--output", o.output, "Output directory")->required();
  analyze->add_flag("--bits", o.bits, "Report bits instead of nats");
  analyze->add_option("--format", o.format, "Input delimiter: auto, comma or tab");

  auto* gen = app.add_subcommand("generate", "Draw a synthetic temporal graph");
  gen->add_option("--output", o.output, "Output directory")->required();
  gen->add_option("--mode", o.mode, "temporal, shuffled or erdos_renyi");
  gen->add_option("--k", o.k, "Planted clusters per vertex axis");
  gen->add_option("--ns", o.ns, "Source vertices");
  gen->add_option("--nd", o.nd, "Destination vertices");
  gen->add_option("--m", o.m, "Edges");
  gen->add_option("--noise", o.noise, "Fraction of reallocated edges");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--format", o.format, "Output delimiter: comma or tab");

  auto* eval = app.add_subcommand("eval", "Score a model against data");
  eval->add_option("--model", o.model, "Model document")->required();
  eval->add_option("--input", o.input, "Edge list")->required();
  eval->add_option("--reference", o.reference, "Model whose cost is informativity 1");
  eval->add_option("--output", o.output, "Optional output directory");
  eval->add_option("--format", o.format, "Input delimiter: auto, comma or tab");

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Repeat a recorded run and compare its outputs");
  rerun->add_option("--input", manifest_path, "manifest.json of the run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  auto* sub = app.get_subcommands().front();
  Manifest manifest(sub->get_name(), args);
  try {
    if (sub == fit) return cmd_fit(o, manifest, out);
    if (sub == coarsen) return cmd_coarsen(o, manifest, out);
    if (sub == analyze) return cmd_analyze(o, manifest, out);
    if (sub == gen) return cmd_generate(o, manifest, out);
    if (sub == eval) return cmd_eval(o, manifest, out);
    return cmd_rerun(manifest_path, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CompatibilityError& e) {
    err << "error: " << e.what() << '\n';
    return kIncompatible;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const EmptyDatasetError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace tricluster::cli
