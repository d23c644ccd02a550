#pragma once

#include <string>
#include <vector>

#include "urnclt/spectrum.hpp"

namespace urnclt {

// Parsed model document before any numeric cleanup. Canonical serialization
// hashes these raw values so that load -> serialize -> load is bit-stable.
struct RawBlockDoc {
  BlockKind kind = BlockKind::Real;
  double lambda_r = 0.0;
  double lambda_c = 0.0;
  int d = 1;
  int col_begin = 0;
  int col_end = 0;
};

struct RawModelDoc {
  bool has_matrix = false;
  std::vector<std::vector<double>> matrix;

  bool has_spectral = false;
  std::vector<std::vector<double>> combination;
  std::vector<RawBlockDoc> blocks;

  std::vector<double> initial_state;  // empty when absent

  bool has_epsilon = false;
  double epsilon_critical = kDefaultCriticalBand;
};

// Parses the model JSON text: exactly one of "replacement_matrix" or
// "spectral_spec" must be present. Raises Parse/Domain errors naming the
// offending field.
RawModelDoc parse_raw_model(const std::string& json_text);

// Deterministic canonical rendering of a raw document (fixed key order,
// 17 significant digits, optional fields omitted when absent).
std::string canonical_model_json(const RawModelDoc& doc);

// FNV-1a 64-bit over the canonical JSON, as a 16-hex-digit string.
std::string fnv1a_hex(const std::string& text);

struct ModelFile {
  UrnModel model;
  RawModelDoc raw;
  std::string canonical_json;
  std::string hash;           // fnv1a_hex(canonical_json)
  std::string mode;           // "matrix" or "spectral"
};

// Builds the model from a raw document (validation errors surface here).
ModelFile model_from_raw(const RawModelDoc& doc, double tol = 1e-10);

ModelFile parse_model_json(const std::string& json_text, double tol = 1e-10);
ModelFile load_model_file(const std::string& path, double tol = 1e-10);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace urnclt
