#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tricluster/triclustering.hpp"

namespace tricluster {

inline constexpr const char* kModelSchema = "tricluster.model/1";
inline constexpr const char* kManifestSchema = "tricluster.manifest/1";
inline constexpr const char* kVersion = "0.1.0";

struct ModelDocument {
  Triclustering model;
  /// Cost of the model that informativity is measured against, when known.
  std::optional<double> reference_cost;
};

/// JSON with memberships, vertex degrees, sparse counts, time boundaries as
/// ranks and as cut values, and the id maps. Costs are informational.
void write_model_json(std::ostream& out, const Triclustering& model,
                      std::optional<double> reference_cost = std::nullopt);

/// Throws DocumentError on malformed documents and InvariantError on
/// inconsistent ones.
ModelDocument read_model_json(std::istream& in);
ModelDocument read_model_file(const std::filesystem::path& path);

/// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);
std::string bytes_digest(std::string_view bytes);

}  // namespace tricluster
