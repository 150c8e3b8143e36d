#include "tricluster/edge_list.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "tricluster/errors.hpp"

namespace tricluster {

Delimiter parse_delimiter(const std::string& name) {
  if (name == "auto") return Delimiter::Auto;
  if (name == "csv" || name == "comma" || name == ",") return Delimiter::Comma;
  if (name == "tsv" || name == "tab" || name == "\\t") return Delimiter::Tab;
  throw std::invalid_argument("unknown delimiter '" + name + "' (expected auto, csv or tsv)");
}

std::vector<std::uint32_t> rank_transform(std::span<const double> raw_times) {
  if (raw_times.empty()) throw std::invalid_argument("rank_transform: empty sequence");
  for (std::size_t n = 0; n < raw_times.size(); ++n) {
    if (!std::isfinite(raw_times[n])) {
      throw std::invalid_argument("rank_transform: non-finite timestamp at position " +
                                  std::to_string(n));
    }
  }
  std::vector<std::uint32_t> order(raw_times.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return raw_times[a] < raw_times[b];
  });
  std::vector<std::uint32_t> ranks(raw_times.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<std::uint32_t>(r + 1);
  return ranks;
}

namespace {

struct IdMapper {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::uint32_t> index;

  std::uint32_t intern(const std::string& id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<std::uint32_t>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  }
};

std::shared_ptr<const std::vector<std::string>> share(std::vector<std::string> ids) {
  return std::make_shared<const std::vector<std::string>>(std::move(ids));
}

}  // namespace

TemporalEdgeList TemporalEdgeList::from_raw(std::span<const RawEdge> edges) {
  if (edges.empty()) throw EmptyDatasetError();
  IdMapper src, dst;
  TemporalEdgeList out;
  out.sources_.reserve(edges.size());
  out.destinations_.reserve(edges.size());
  out.raw_times_.reserve(edges.size());
  for (const auto& e : edges) {
    out.sources_.push_back(src.intern(e.source));
    out.destinations_.push_back(dst.intern(e.destination));
    out.raw_times_.push_back(e.time);
  }
  out.ranks_ = rank_transform(out.raw_times_);
  out.source_ids_ = share(std::move(src.ids));
  out.destination_ids_ = share(std::move(dst.ids));
  out.validate();
  return out;
}

TemporalEdgeList TemporalEdgeList::from_raw(std::span<const RawEdge> edges,
                                            const std::vector<std::string>& source_universe,
                                            const std::vector<std::string>& destination_universe) {
  if (edges.empty()) throw EmptyDatasetError();
  IdMapper src, dst;
  for (const auto& id : source_universe) src.intern(id);
  for (const auto& id : destination_universe) dst.intern(id);
  const auto n_src = src.ids.size();
  const auto n_dst = dst.ids.size();
  TemporalEdgeList out;
  for (const auto& e : edges) {
    auto s = src.intern(e.source);
    auto d = dst.intern(e.destination);
    if (s >= n_src) throw CoverageError("source '" + e.source + "' is not in the source universe");
    if (d >= n_dst) {
      throw CoverageError("destination '" + e.destination + "' is not in the destination universe");
    }
    out.sources_.push_back(s);
    out.destinations_.push_back(d);
    out.raw_times_.push_back(e.time);
  }
  out.ranks_ = rank_transform(out.raw_times_);
  out.source_ids_ = share(std::move(src.ids));
  out.destination_ids_ = share(std::move(dst.ids));
  out.validate();
  return out;
}

TemporalEdgeList TemporalEdgeList::from_indices(const std::vector<std::string>& source_ids,
                                                const std::vector<std::string>& destination_ids,
                                                std::vector<std::uint32_t> sources,
                                                std::vector<std::uint32_t> destinations,
                                                std::vector<double> raw_times,
                                                std::vector<std::uint32_t> ranks,
                                                bool keep_isolated) {
  if (sources.empty()) throw EmptyDatasetError();
  if (sources.size() != destinations.size()) {
    throw std::invalid_argument("from_indices: source and destination sequences differ in length");
  }
  if (ranks.empty()) ranks = rank_transform(raw_times);
  if (!raw_times.empty() && raw_times.size() != sources.size()) {
    throw std::invalid_argument("from_indices: raw time sequence has the wrong length");
  }

  auto compact = [&](const std::vector<std::string>& ids, std::vector<std::uint32_t>& endpoints) {
    for (auto v : endpoints) {
      if (v >= ids.size()) throw CoverageError("from_indices: vertex index out of range");
    }
    if (keep_isolated) return share(ids);
    std::vector<std::uint32_t> remap(ids.size(), UINT32_MAX);
    for (auto v : endpoints) remap[v] = 0;
    std::vector<std::string> kept;
    for (std::size_t v = 0; v < ids.size(); ++v) {
      if (remap[v] == 0) {
        remap[v] = static_cast<std::uint32_t>(kept.size());
        kept.push_back(ids[v]);
      }
    }
    for (auto& v : endpoints) v = remap[v];
    return share(std::move(kept));
  };

  TemporalEdgeList out;
  out.source_ids_ = compact(source_ids, sources);
  out.destination_ids_ = compact(destination_ids, destinations);
  out.sources_ = std::move(sources);
  out.destinations_ = std::move(destinations);
  out.ranks_ = std::move(ranks);
  out.raw_times_ = std::move(raw_times);
  out.validate();
  return out;
}

void TemporalEdgeList::validate() const {
  const auto m = sources_.size();
  if (destinations_.size() != m || ranks_.size() != m) {
    throw InvariantError("edge list sequences differ in length");
  }
  std::vector<bool> seen(m + 1, false);
  for (auto r : ranks_) {
    if (r < 1 || r > m || seen[r]) throw InvariantError("time ranks are not a permutation of 1..m");
    seen[r] = true;
  }
  for (auto s : sources_) {
    if (s >= source_ids_->size()) throw InvariantError("source index out of range");
  }
  for (auto d : destinations_) {
    if (d >= destination_ids_->size()) throw InvariantError("destination index out of range");
  }
}

std::vector<std::int64_t> TemporalEdgeList::out_degrees() const {
  std::vector<std::int64_t> deg(num_sources(), 0);
  for (auto s : sources_) ++deg[s];
  return deg;
}

std::vector<std::int64_t> TemporalEdgeList::in_degrees() const {
  std::vector<std::int64_t> deg(num_destinations(), 0);
  for (auto d : destinations_) ++deg[d];
  return deg;
}

std::vector<std::uint32_t> TemporalEdgeList::edges_by_rank() const {
  std::vector<std::uint32_t> out(num_edges());
  for (std::size_t n = 0; n < ranks_.size(); ++n) out[ranks_[n] - 1] = static_cast<std::uint32_t>(n);
  return out;
}

std::shared_ptr<const std::vector<double>> TemporalEdgeList::times_by_rank() const {
  if (raw_times_.empty()) return std::make_shared<const std::vector<double>>();
  std::vector<double> sorted(num_edges());
  for (std::size_t n = 0; n < ranks_.size(); ++n) sorted[ranks_[n] - 1] = raw_times_[n];
  return std::make_shared<const std::vector<double>>(std::move(sorted));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

TemporalEdgeList ingest_edges(std::istream& in, Delimiter delimiter) {
  std::vector<RawEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  char delim = delimiter == Delimiter::Tab ? '\t' : ',';
  bool delimiter_known = delimiter != Delimiter::Auto;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!delimiter_known) {
      delim = view.find('\t') != std::string_view::npos ? '\t' : ',';
      delimiter_known = true;
    }
    auto fields = split(view, delim);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields (src, dst, time), found " +
                                    std::to_string(fields.size()));
    }
    double t = 0.0;
    if (!parse_double(fields[2], t)) {
      if (first_row) {
        first_row = false;
        continue;  // header
      }
      throw ParseError(line_no, "timestamp '" + std::string(trim(fields[2])) + "' is not numeric");
    }
    if (!std::isfinite(t)) throw ParseError(line_no, "timestamp is not finite");
    auto src = trim(fields[0]);
    auto dst = trim(fields[1]);
    if (src.empty() || dst.empty()) throw ParseError(line_no, "empty vertex id");
    first_row = false;
    edges.push_back(RawEdge{std::string(src), std::string(dst), t});
  }
  if (edges.empty()) throw EmptyDatasetError();
  return TemporalEdgeList::from_raw(edges);
}

TemporalEdgeList read_edge_file(const std::filesystem::path& path, Delimiter delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return ingest_edges(in, delimiter);
}

void write_edges(std::ostream& out, const TemporalEdgeList& edges, char delimiter) {
  const auto& sid = edges.source_ids();
  const auto& did = edges.destination_ids();
  auto src = edges.sources();
  auto dst = edges.destinations();
  auto raw = edges.raw_times();
  auto ranks = edges.time_ranks();
  char buf[64];
  for (std::size_t n = 0; n < edges.num_edges(); ++n) {
    out << sid[src[n]] << delimiter << did[dst[n]] << delimiter;
    if (raw.empty()) {
      out << ranks[n];
    } else {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), raw[n]);
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace tricluster
