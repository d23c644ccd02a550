#include "urnclt/model_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "urnclt/report.hpp"

namespace urnclt {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorKind::Parse, "model file: " + what);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + " must be a number");
  return j.get<double>();
}

std::vector<std::vector<double>> rows_at(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where + " must be a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array()) parse_fail(where + " rows must be arrays");
    std::vector<double> vals;
    for (std::size_t c = 0; c < row.size(); ++c)
      vals.push_back(number_at(row[c], where + " entry"));
    rows.push_back(std::move(vals));
  }
  std::size_t k = rows.size();
  for (const auto& row : rows)
    if (row.size() != k) parse_fail(where + " must be square (rows of length " +
                                    std::to_string(k) + ")");
  return rows;
}

BlockKind kind_from_string(const std::string& s) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "real") return BlockKind::Real;
  if (lower == "complexpair" || lower == "complex_pair" || lower == "complex")
    return BlockKind::ComplexPair;
  parse_fail("block kind must be \"real\" or \"complex_pair\", got \"" + s + "\"");
}

}  // namespace

RawModelDoc parse_raw_model(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) parse_fail("top level must be a JSON object");

  RawModelDoc doc;
  doc.has_matrix = root.contains("replacement_matrix");
  doc.has_spectral = root.contains("spectral_spec");
  if (doc.has_matrix == doc.has_spectral)
    parse_fail("exactly one of replacement_matrix / spectral_spec must be present");

  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& key = it.key();
    if (key != "replacement_matrix" && key != "spectral_spec" &&
        key != "initial_state" && key != "epsilon_critical")
      parse_fail("unknown field \"" + key + "\"");
  }

  if (doc.has_matrix)
    doc.matrix = rows_at(root["replacement_matrix"], "replacement_matrix");

  if (doc.has_spectral) {
    const json& spec = root["spectral_spec"];
    if (!spec.is_object()) parse_fail("spectral_spec must be an object");
    if (!spec.contains("combination") || !spec.contains("blocks"))
      parse_fail("spectral_spec needs combination and blocks");
    doc.combination = rows_at(spec["combination"], "spectral_spec.combination");
    const json& blocks = spec["blocks"];
    if (!blocks.is_array() || blocks.empty())
      parse_fail("spectral_spec.blocks must be a nonempty array");
    for (const json& b : blocks) {
      if (!b.is_object()) parse_fail("each block must be an object");
      RawBlockDoc rb;
      if (!b.contains("kind")) parse_fail("block needs a kind");
      if (!b["kind"].is_string()) parse_fail("block kind must be a string");
      rb.kind = kind_from_string(b["kind"].get<std::string>());
      if (!b.contains("lambda_r")) parse_fail("block needs lambda_r");
      rb.lambda_r = number_at(b["lambda_r"], "block lambda_r");
      if (b.contains("lambda_c")) rb.lambda_c = number_at(b["lambda_c"], "block lambda_c");
      rb.d = 1;
      if (b.contains("d")) {
        if (!b["d"].is_number_integer()) parse_fail("block d must be an integer");
        rb.d = b["d"].get<int>();
      }
      if (!b.contains("columns")) parse_fail("block needs a columns range");
      const json& cols = b["columns"];
      if (!cols.is_array() || cols.size() != 2 || !cols[0].is_number_integer() ||
          !cols[1].is_number_integer())
        parse_fail("block columns must be [begin, end) integers");
      rb.col_begin = cols[0].get<int>();
      rb.col_end = cols[1].get<int>();
      doc.blocks.push_back(rb);
    }
  }

  if (root.contains("initial_state")) {
    const json& init = root["initial_state"];
    if (!init.is_array() || init.empty()) parse_fail("initial_state must be a nonempty array");
    for (const json& v : init)
      doc.initial_state.push_back(number_at(v, "initial_state entry"));
  }

  if (root.contains("epsilon_critical")) {
    doc.has_epsilon = true;
    doc.epsilon_critical = number_at(root["epsilon_critical"], "epsilon_critical");
    if (!(doc.epsilon_critical >= 0.0) || doc.epsilon_critical >= 0.5)
      fail(ErrorKind::Domain, "epsilon_critical must lie in [0, 0.5)");
  }

  return doc;
}

std::string canonical_model_json(const RawModelDoc& doc) {
  JsonWriter w;
  w.begin_object();
  if (doc.has_matrix) {
    w.key("replacement_matrix");
    w.begin_array();
    for (const auto& row : doc.matrix) {
      w.begin_array();
      for (double v : row) w.value(v);
      w.end_array();
    }
    w.end_array();
  }
  if (doc.has_spectral) {
    w.key("spectral_spec");
    w.begin_object();
    w.key("combination");
    w.begin_array();
    for (const auto& row : doc.combination) {
      w.begin_array();
      for (double v : row) w.value(v);
      w.end_array();
    }
    w.end_array();
    w.key("blocks");
    w.begin_array();
    for (const auto& b : doc.blocks) {
      w.begin_object();
      w.kv("kind", std::string(b.kind == BlockKind::Real ? "real" : "complex_pair"));
      w.kv("lambda_r", b.lambda_r);
      w.kv("lambda_c", b.lambda_c);
      w.kv("d", b.d);
      w.key("columns");
      w.begin_array();
      w.value(b.col_begin);
      w.value(b.col_end);
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  if (!doc.initial_state.empty()) {
    w.key("initial_state");
    w.begin_array();
    for (double v : doc.initial_state) w.value(v);
    w.end_array();
  }
  if (doc.has_epsilon) w.kv("epsilon_critical", doc.epsilon_critical);
  w.end_object();
  return w.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

ModelFile model_from_raw(const RawModelDoc& doc, double tol) {
  ModelFile out;
  out.raw = doc;
  out.canonical_json = canonical_model_json(doc);
  out.hash = fnv1a_hex(out.canonical_json);
  double eps = doc.has_epsilon ? doc.epsilon_critical : kDefaultCriticalBand;

  if (doc.has_matrix) {
    out.mode = "matrix";
    int k = static_cast<int>(doc.matrix.size());
    Matrix r(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) r(i, j) = doc.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    StochasticMatrix sm = StochasticMatrix::from_matrix(r, 1e-12);
    out.model = model_from_matrix(sm, tol, eps);
  } else {
    out.mode = "spectral";
    SpectralSpec spec;
    spec.k = static_cast<int>(doc.combination.size());
    spec.combination = Matrix(spec.k, spec.k);
    for (int i = 0; i < spec.k; ++i)
      for (int j = 0; j < spec.k; ++j)
        spec.combination(i, j) = doc.combination[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (const auto& rb : doc.blocks) {
      JordanBlockSpec b;
      b.kind = rb.kind;
      b.lambda_r = rb.lambda_r;
      b.lambda_c = rb.lambda_c;
      b.d = rb.d;
      b.col_begin = rb.col_begin;
      if (rb.col_end != b.col_end())
        fail(ErrorKind::Domain,
             "block columns [" + std::to_string(rb.col_begin) + "," +
                 std::to_string(rb.col_end) +
                 ") must span d (real) or 2d (complex_pair) columns");
      spec.blocks.push_back(b);
    }
    out.model = model_from_spectral_spec(spec, tol, eps);
  }

  if (!doc.initial_state.empty()) {
    if (static_cast<int>(doc.initial_state.size()) != out.model.colors())
      fail(ErrorKind::Domain, "initial_state length must equal the color count");
    out.model.set_initial_state(Vec(doc.initial_state.begin(), doc.initial_state.end()));
  }
  return out;
}

ModelFile parse_model_json(const std::string& json_text, double tol) {
  return model_from_raw(parse_raw_model(json_text), tol);
}

ModelFile load_model_file(const std::string& path, double tol) {
  return parse_model_json(read_text_file(path), tol);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Parse, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) fail(ErrorKind::Parse, "cannot write file: " + path);
  outf << content;
  if (!outf) fail(ErrorKind::Parse, "write failed: " + path);
}

}  // namespace urnclt
