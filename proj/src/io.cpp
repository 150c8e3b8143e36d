#include "tricluster/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/errors.hpp"

namespace tricluster {

using nlohmann::json;

namespace {

json vertex_block(const std::vector<std::string>& ids, std::span<const std::uint32_t> partition,
                  std::span<const std::int64_t> degrees, std::uint32_t k) {
  std::vector<std::vector<std::string>> members(k);
  for (std::size_t v = 0; v < ids.size(); ++v) members[partition[v]].push_back(ids[v]);
  return json{{"ids", ids},
              {"partition", std::vector<std::uint32_t>(partition.begin(), partition.end())},
              {"degrees", std::vector<std::int64_t>(degrees.begin(), degrees.end())},
              {"clusters", members}};
}

}  // namespace

void write_model_json(std::ostream& out, const Triclustering& model, std::optional<double> reference_cost) {
  json doc;
  doc["schema"] = kModelSchema;
  doc["m"] = model.num_edges();
  doc["k"] = {model.k_sources(), model.k_destinations(), model.k_time()};
  doc["sources"] = vertex_block(model.source_ids(), model.source_partition(), model.out_degrees(), model.k_sources());
  doc["destinations"] =
      vertex_block(model.destination_ids(), model.destination_partition(), model.in_degrees(), model.k_destinations());
  json time;
  time["boundaries"] = std::vector<std::uint32_t>(model.time_boundaries().begin(), model.time_boundaries().end());
  if (model.times_by_rank() && !model.times_by_rank()->empty()) {
    time["cut_values"] = model.time_cut_values();
  } else {
    time["cut_values"] = nullptr;
  }
  doc["time"] = std::move(time);
  json cells = json::array();
  for (const auto& c : model.cells()) cells.push_back({c.i, c.j, c.l, c.count});
  doc["cells"] = std::move(cells);
  const double c = cost(model).total;
  doc["cost"] = c;
  doc["null_cost"] = null_cost(model).total;
  if (reference_cost) doc["reference_cost"] = *reference_cost;
  out << doc.dump(1) << '\n';
}

ModelDocument read_model_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DocumentError(std::string("model document: ") + e.what());
  }
  try {
    if (doc.at("schema").get<std::string>() != kModelSchema) {
      throw DocumentError("model document: unsupported schema '" + doc.at("schema").get<std::string>() + "'");
    }
    TriclusteringParts parts;
    parts.source_partition = doc.at("sources").at("partition").get<std::vector<std::uint32_t>>();
    parts.destination_partition = doc.at("destinations").at("partition").get<std::vector<std::uint32_t>>();
    parts.out_degrees = doc.at("sources").at("degrees").get<std::vector<std::int64_t>>();
    parts.in_degrees = doc.at("destinations").at("degrees").get<std::vector<std::int64_t>>();
    parts.source_ids = std::make_shared<const std::vector<std::string>>(
        doc.at("sources").at("ids").get<std::vector<std::string>>());
    parts.destination_ids = std::make_shared<const std::vector<std::string>>(
        doc.at("destinations").at("ids").get<std::vector<std::string>>());
    parts.time_boundaries = doc.at("time").at("boundaries").get<std::vector<std::uint32_t>>();
    for (const auto& c : doc.at("cells")) {
      parts.cells.push_back(
          {c.at(0).get<std::uint32_t>(), c.at(1).get<std::uint32_t>(), c.at(2).get<std::uint32_t>(),
           c.at(3).get<std::int64_t>()});
    }
    ModelDocument out{Triclustering(std::move(parts)), std::nullopt};
    if (doc.contains("reference_cost")) out.reference_cost = doc.at("reference_cost").get<double>();
    return out;
  } catch (const json::exception& e) {
    throw DocumentError(std::string("model document: ") + e.what());
  }
}

ModelDocument read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open " + path.string());
  return read_model_json(in);
}

std::string bytes_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return bytes_digest(buf.str());
}

}  // namespace tricluster
