#include "urnclt/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "urnclt/report.hpp"

namespace fs = std::filesystem;

namespace urnclt {

namespace {

constexpr const char* kToolName = "urnclt";
constexpr const char* kToolVersion = "1.0.0";

void matrix_field(JsonWriter& w, const Matrix& m) {
  w.begin_array();
  for (int r = 0; r < m.rows(); ++r) {
    w.begin_array();
    for (int c = 0; c < m.cols(); ++c) w.value(m(r, c));
    w.end_array();
  }
  w.end_array();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

}  // namespace

std::string spectrum_json(const UrnModel& model, const std::string& hash,
                          const std::string& mode) {
  JsonWriter w;
  w.begin_object();
  w.kv("model_hash", hash);
  w.kv("mode", mode);
  w.kv("colors", model.colors());
  w.key("pi");
  w.begin_array();
  for (int c = 0; c < model.colors(); ++c) w.value(model.pi[c]);
  w.end_array();
  w.key("combination");
  matrix_field(w, model.spec.combination);
  w.key("blocks");
  w.begin_array();
  for (std::size_t i = 0; i < model.spec.blocks.size(); ++i) {
    const auto& b = model.spec.blocks[i];
    w.begin_object();
    w.kv("kind", std::string(block_kind_name(b.kind)));
    w.kv("lambda_r", b.lambda_r);
    w.kv("lambda_c", b.lambda_c);
    w.kv("d", b.d);
    w.key("columns");
    w.begin_array();
    w.value(b.col_begin);
    w.value(b.col_end());
    w.end_array();
    w.kv("regime", std::string(regime_name(model.regimes[i])));
    w.end_object();
  }
  w.end_array();
  w.key("replacement");
  matrix_field(w, model.replacement.matrix());
  w.kv("epsilon_critical", model.epsilon_critical);
  w.key("warnings");
  w.begin_array();
  for (const auto& s : model.warnings) w.value(s);
  w.end_array();
  w.end_object();
  return w.str();
}

std::string spectrum_text(const UrnModel& model, const std::string& hash,
                          const std::string& mode) {
  std::string out;
  out += "model " + hash + " (" + mode + " input), " +
         std::to_string(model.colors()) + " colors\n";
  out += "pi:";
  for (int c = 0; c < model.colors(); ++c) out += " " + fmt6(model.pi[c]);
  out += "\n";
  for (std::size_t i = 0; i < model.spec.blocks.size(); ++i) {
    const auto& b = model.spec.blocks[i];
    out += "block " + std::to_string(i + 1) + ": kind=" + block_kind_name(b.kind) +
           " lambda=" + fmt6(b.lambda_r);
    if (b.kind == BlockKind::ComplexPair) out += "+-" + fmt6(b.lambda_c) + "i";
    out += " d=" + std::to_string(b.d) + " columns=[" + std::to_string(b.col_begin) +
           "," + std::to_string(b.col_end()) + ") regime=" +
           regime_name(model.regimes[i]) + "\n";
  }
  for (const auto& s : model.warnings) out += "warning: " + s + "\n";
  return out;
}

std::string limits_json(const LimitCovariance& lim, const std::string& hash) {
  JsonWriter w;
  w.begin_object();
  w.kv("model_hash", hash);
  auto cols = [&w](const char* key, const std::vector<int>& v) {
    w.key(key);
    w.begin_array();
    for (int c : v) w.value(c);
    w.end_array();
  };
  cols("sub_cols", lim.sub_cols);
  cols("crit_cols", lim.crit_cols);
  cols("super_cols", lim.super_cols);
  w.key("subcritical");
  if (lim.sub_cols.empty())
    w.null();
  else
    matrix_field(w, lim.subcritical);
  w.key("critical");
  if (lim.crit_cols.empty()) {
    w.null();
  } else {
    w.begin_object();
    w.key("matrix");
    matrix_field(w, lim.critical.matrix);
    w.key("uniform_half_variant");
    matrix_field(w, lim.critical.uniform_half_variant);
    w.key("cross_kind_pairs");
    w.begin_array();
    for (const auto& p : lim.critical.cross_kind_pairs) {
      w.begin_array();
      w.value(p.first);
      w.value(p.second);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.key("supercritical");
  if (lim.super_cols.empty()) {
    w.null();
  } else {
    w.begin_object();
    w.key("matrix");
    matrix_field(w, lim.supercritical);
    w.key("tail");
    matrix_field(w, lim.supercritical_tail);
    w.kv("cross_horizon", lim.cross_horizon);
    w.end_object();
  }
  w.end_object();
  return w.str();
}

std::string report_json(const VerificationReport& rep) {
  JsonWriter w;
  w.begin_object();
  w.kv("model_hash", rep.model_hash);
  w.kv("base_seed", rep.base_seed);
  w.kv("paths", rep.paths);
  w.kv("horizon", rep.horizon);
  w.key("eval_points");
  w.begin_array();
  for (auto n : rep.eval_points) w.value(n);
  w.end_array();
  w.key("labels");
  w.begin_array();
  for (const auto& s : rep.labels) w.value(s);
  w.end_array();
  w.kv("tamper_variance_factor", rep.tamper_variance_factor);
  w.key("limits");
  w.raw(limits_json(rep.limits, rep.model_hash));
  w.key("tables");
  w.begin_array();
  for (const auto& t : rep.tables) {
    w.begin_object();
    w.kv("n", t.n);
    auto vec = [&w](const char* key, const Vec& v) {
      w.key(key);
      w.begin_array();
      for (double x : v) w.value(x);
      w.end_array();
    };
    vec("emp_mean", t.emp_mean);
    vec("emp_var", t.emp_var);
    vec("exact_mean", t.exact_mean);
    vec("exact_var", t.exact_var);
    w.end_object();
  }
  w.end_array();
  w.key("checks");
  w.begin_array();
  for (const auto& c : rep.checks) {
    w.begin_object();
    w.kv("name", c.name);
    w.kv("pass", c.pass);
    w.kv("observed", c.observed);
    w.kv("threshold", c.threshold);
    w.kv("detail", c.detail);
    w.end_object();
  }
  w.end_array();
  w.key("notes");
  w.begin_array();
  for (const auto& s : rep.notes) w.value(s);
  w.end_array();
  w.kv("pass", rep.pass);
  w.end_object();
  return w.str();
}

std::string report_text(const VerificationReport& rep) {
  std::string out;
  out += "model " + rep.model_hash + "  seed " + std::to_string(rep.base_seed) +
         "  paths " + std::to_string(rep.paths) + "  horizon " +
         std::to_string(rep.horizon) + "\n";
  if (rep.tamper_variance_factor != 1.0)
    out += "WARNING: variance tamper factor " + fmt6(rep.tamper_variance_factor) +
           " active (debug)\n";
  out += "eval points:";
  for (auto n : rep.eval_points) out += " " + std::to_string(n);
  out += "\nstats:";
  for (const auto& s : rep.labels) out += " " + s;
  out += "\n\n";
  char line[256];
  for (const auto& c : rep.checks) {
    std::snprintf(line, sizeof(line), "%-5s %-28s observed=%-12.6g threshold=%-12.6g %s\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.threshold,
                  c.detail.c_str());
    out += line;
  }
  for (const auto& s : rep.notes) out += "note: " + s + "\n";
  out += rep.pass ? "\noverall: PASS\n" : "\noverall: FAIL\n";
  return out;
}

namespace {

// Every tunable the CLI accepts: the manifest echoes all of them so a rerun
// is self-contained.
struct RunOptions {
  double tol = 1e-10;
  std::int64_t horizon = 100'000;
  std::vector<std::int64_t> checkpoints = {1'000, 10'000, 100'000};
  std::uint64_t seed = 42;
  std::int64_t paths = 10'000;
  std::string emit = "stats";
  int workers = 0;
  std::int64_t cross_horizon = 1'000'000;
  double strong_law_delta = 0.05;
  double tamper_variance_factor = 1.0;
};

std::string iso_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[40];
  std::tm tmv{};
  gmtime_r(&t, &tmv);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tmv);
  return std::string(buf);
}

std::string manifest_json(const std::string& command, const ModelFile& mf,
                          const RunOptions& opt) {
  JsonWriter w;
  w.begin_object();
  w.kv("tool", std::string(kToolName));
  w.kv("version", std::string(kToolVersion));
  w.kv("command", command);
  w.kv("model_hash", mf.hash);
  w.key("model");
  w.raw(mf.canonical_json);
  w.key("options");
  w.begin_object();
  w.kv("tol", opt.tol);
  w.kv("horizon", opt.horizon);
  w.key("checkpoints");
  w.begin_array();
  for (auto n : opt.checkpoints) w.value(n);
  w.end_array();
  w.kv("seed", opt.seed);
  w.kv("paths", opt.paths);
  w.kv("emit", opt.emit);
  w.kv("workers", opt.workers);
  w.kv("cross_horizon", opt.cross_horizon);
  w.kv("strong_law_delta", opt.strong_law_delta);
  w.kv("tamper_variance_factor", opt.tamper_variance_factor);
  w.end_object();
  w.kv("timestamp", iso_timestamp());
  w.end_object();
  return w.str();
}

void write_output(const fs::path& dir, const std::string& name,
                  const std::string& content) {
  fs::create_directories(dir);
  write_text_file((dir / name).string(), content);
}

// Checkpoints actually used: those within the horizon, plus the horizon.
std::vector<std::int64_t> effective_checkpoints(const RunOptions& opt) {
  std::vector<std::int64_t> pts;
  for (auto n : opt.checkpoints)
    if (n <= opt.horizon) pts.push_back(n);
  if (pts.empty() || pts.back() != opt.horizon) pts.push_back(opt.horizon);
  return pts;
}

int do_spectrum(const ModelFile& mf, const RunOptions& opt, const fs::path& out) {
  std::string text = spectrum_text(mf.model, mf.hash, mf.mode);
  write_output(out, "spectrum.json", spectrum_json(mf.model, mf.hash, mf.mode));
  write_output(out, "spectrum.txt", text);
  write_output(out, "manifest.json", manifest_json("spectrum", mf, opt));
  std::cout << text;
  return 0;
}

std::string states_csv(const UrnModel& model,
                       const std::vector<std::int64_t>& points,
                       const std::vector<Matrix>& states, std::int64_t paths) {
  const int k = model.colors();
  std::string out;
  if (paths > 1) out += "path,";
  out += "n";
  for (int c = 0; c < k; ++c) out += ",W_" + std::to_string(c);
  out += "\n";
  for (std::int64_t p = 0; p < paths; ++p)
    for (std::size_t e = 0; e < points.size(); ++e) {
      if (paths > 1) out += std::to_string(p) + ",";
      out += std::to_string(points[e]);
      for (int c = 0; c < k; ++c)
        out += "," + fmt17(states[e](static_cast<int>(p), c));
      out += "\n";
    }
  return out;
}

std::string stats_csv(const std::vector<std::string>& labels,
                      const EnsembleResult& ens) {
  std::string out = "path";
  for (std::size_t e = 0; e < ens.eval_points.size(); ++e)
    for (const auto& lab : labels)
      out += "," + lab + "@" + std::to_string(ens.eval_points[e]);
  out += "\n";
  for (std::int64_t p = 0; p < ens.paths; ++p) {
    out += std::to_string(p);
    for (std::size_t e = 0; e < ens.eval_points.size(); ++e)
      for (int s = 0; s < ens.samples[e].cols(); ++s)
        out += "," + fmt17(ens.samples[e](static_cast<int>(p), s));
    out += "\n";
  }
  return out;
}

int do_simulate(const ModelFile& mf, const RunOptions& opt, const fs::path& out) {
  std::vector<std::int64_t> points = effective_checkpoints(opt);
  if (opt.emit == "stats") {
    EnsembleConfig cfg;
    cfg.paths = opt.paths;
    cfg.horizon = opt.horizon;
    cfg.checkpoints = points;
    cfg.base_seed = opt.seed;
    cfg.workers = opt.workers;
    EnsembleResult ens = run_ensemble(mf.model, cfg);
    write_output(out, "stats.csv", stats_csv(stat_labels(mf.model), ens));
    write_output(out, "manifest.json", manifest_json("simulate", mf, opt));
    std::cout << "wrote stats.csv (" << ens.paths << " paths, "
              << ens.eval_points.size() << " checkpoints)\n";
    return 0;
  }
  if (opt.emit != "states")
    fail(ErrorKind::Domain, "--emit must be states or stats");
  if (opt.paths < 1) fail(ErrorKind::Domain, "--paths must be positive");
  if (opt.paths > 1'000'000) fail(ErrorKind::Domain, "--paths capped at 1e6");

  const int k = mf.model.colors();
  std::vector<Matrix> states(points.size(),
                             Matrix(static_cast<int>(opt.paths), k));
  int workers = opt.workers > 0 ? opt.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<std::int64_t>(workers, opt.paths));
  auto run_range = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      Trajectory traj = simulate_stream(mf.model, opt.horizon, points,
                                        RngStream::for_path(opt.seed,
                                                            static_cast<std::uint64_t>(p)));
      for (std::size_t e = 0; e < points.size(); ++e)
        for (int c = 0; c < k; ++c)
          states[e](static_cast<int>(p), c) = traj.states[e][static_cast<std::size_t>(c)];
    }
  };
  if (workers == 1) {
    run_range(0, opt.paths);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::int64_t chunk = (opt.paths + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(opt.paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, t, lo, hi]() {
        try {
          run_range(lo, hi);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  write_output(out, "states.csv", states_csv(mf.model, points, states, opt.paths));
  write_output(out, "manifest.json", manifest_json("simulate", mf, opt));
  std::cout << "wrote states.csv (" << opt.paths << " paths, " << points.size()
            << " checkpoints)\n";
  return 0;
}

int do_limits(const ModelFile& mf, const RunOptions& opt, const fs::path& out) {
  LimitCovariance lim = limit_covariance(mf.model, opt.cross_horizon);
  std::string json = limits_json(lim, mf.hash);
  write_output(out, "limits.json", json);
  write_output(out, "manifest.json", manifest_json("limits", mf, opt));
  std::cout << json << "\n";
  return 0;
}

int do_verify(const ModelFile& mf, const RunOptions& opt, const fs::path& out) {
  EnsembleConfig cfg;
  cfg.paths = opt.paths;
  cfg.horizon = opt.horizon;
  cfg.checkpoints = effective_checkpoints(opt);
  cfg.base_seed = opt.seed;
  cfg.workers = opt.workers;
  VerifyOptions vo;
  vo.tamper_variance_factor = opt.tamper_variance_factor;
  vo.strong_law_delta = opt.strong_law_delta;
  vo.cross_horizon = opt.cross_horizon;
  VerificationReport rep = verify(mf.model, cfg, vo);
  rep.model_hash = mf.hash;
  std::string text = report_text(rep);
  write_output(out, "report.json", report_json(rep));
  write_output(out, "report.txt", text);
  write_output(out, "manifest.json", manifest_json("verify", mf, opt));
  std::cout << text;
  return rep.pass ? 0 : 1;
}

int dispatch(const std::string& command, const ModelFile& mf, const RunOptions& opt,
             const fs::path& out) {
  if (command == "spectrum") return do_spectrum(mf, opt, out);
  if (command == "simulate") return do_simulate(mf, opt, out);
  if (command == "limits") return do_limits(mf, opt, out);
  if (command == "verify") return do_verify(mf, opt, out);
  fail(ErrorKind::Parse, "manifest command must be spectrum/simulate/limits/verify");
}

int do_rerun(const std::string& manifest_path, const fs::path& out,
             int workers_override) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("manifest: invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("command") || !root.contains("model") ||
      !root.contains("options"))
    fail(ErrorKind::Parse, "manifest: needs command, model, and options fields");

  std::string command = root["command"].get<std::string>();
  RunOptions opt;
  const nlohmann::json& o = root["options"];
  auto get_num = [&o](const char* key, double dflt) {
    return o.contains(key) ? o[key].get<double>() : dflt;
  };
  opt.tol = get_num("tol", opt.tol);
  opt.horizon = static_cast<std::int64_t>(get_num("horizon", static_cast<double>(opt.horizon)));
  if (o.contains("checkpoints")) {
    opt.checkpoints.clear();
    for (const auto& v : o["checkpoints"]) opt.checkpoints.push_back(v.get<std::int64_t>());
  }
  if (o.contains("seed")) opt.seed = o["seed"].get<std::uint64_t>();
  opt.paths = static_cast<std::int64_t>(get_num("paths", static_cast<double>(opt.paths)));
  if (o.contains("emit")) opt.emit = o["emit"].get<std::string>();
  if (o.contains("workers")) opt.workers = o["workers"].get<int>();
  opt.cross_horizon = static_cast<std::int64_t>(
      get_num("cross_horizon", static_cast<double>(opt.cross_horizon)));
  opt.strong_law_delta = get_num("strong_law_delta", opt.strong_law_delta);
  opt.tamper_variance_factor = get_num("tamper_variance_factor", opt.tamper_variance_factor);
  if (workers_override >= 0) opt.workers = workers_override;

  ModelFile mf = parse_model_json(root["model"].dump(), opt.tol);
  return dispatch(command, mf, opt, out);
}

int resolve_workers(int flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("URNCLT_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 0 && v <= 256) return static_cast<int>(v);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"multicolor urn CLT simulation and verification"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  RunOptions opt;
  std::string model_path;
  std::string out_dir = ".";
  std::string manifest_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", model_path, "model JSON file")->required();
    sub->add_option("--out-dir", out_dir, "output directory (default .)");
    sub->add_option("--tol", opt.tol, "numerical tolerance");
  };

  CLI::App* c_spec = app.add_subcommand("spectrum", "eigenstructure, regimes, pi");
  add_common(c_spec);

  CLI::App* c_sim = app.add_subcommand("simulate", "simulate paths, export CSV");
  add_common(c_sim);
  c_sim->add_option("--horizon", opt.horizon, "number of draws");
  c_sim->add_option("--checkpoints", opt.checkpoints, "checkpoint draws")
      ->delimiter(',');
  c_sim->add_option("--seed", opt.seed, "base RNG seed");
  c_sim->add_option("--paths", opt.paths, "number of independent paths");
  c_sim->add_option("--emit", opt.emit, "states|stats (default stats)");
  CLI::Option* sim_workers = c_sim->add_option("--workers", opt.workers, "worker threads");

  CLI::App* c_lim = app.add_subcommand("limits", "regime limit covariances");
  add_common(c_lim);
  c_lim->add_option("--cross-horizon", opt.cross_horizon,
                    "recursion horizon for supercritical cross moments");

  CLI::App* c_ver = app.add_subcommand("verify", "full CLT verification report");
  add_common(c_ver);
  c_ver->add_option("--horizon", opt.horizon, "number of draws");
  c_ver->add_option("--checkpoints", opt.checkpoints, "checkpoint draws")
      ->delimiter(',');
  c_ver->add_option("--seed", opt.seed, "base RNG seed");
  c_ver->add_option("--paths", opt.paths, "number of independent paths");
  CLI::Option* ver_workers = c_ver->add_option("--workers", opt.workers, "worker threads");
  c_ver->add_option("--cross-horizon", opt.cross_horizon,
                    "recursion horizon for supercritical cross moments");
  c_ver->add_option("--strong-law-delta", opt.strong_law_delta,
                    "strong-law deviation band");
  c_ver->add_option("--debug-tamper-variance", opt.tamper_variance_factor,
                    "multiply theoretical variances (sensitivity self-test)");

  CLI::App* c_rerun = app.add_subcommand("rerun", "re-execute a run manifest");
  c_rerun->add_option("manifest", manifest_path, "manifest JSON file")->required();
  c_rerun->add_option("--out-dir", out_dir, "output directory (default .)");
  int rerun_workers = -1;
  c_rerun->add_option("--workers", rerun_workers, "worker threads override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fs::path out(out_dir);
    if (app.got_subcommand(c_rerun)) {
      if (rerun_workers < 0) rerun_workers = resolve_workers(-1, false) > 0
                                                 ? resolve_workers(-1, false)
                                                 : -1;
      return do_rerun(manifest_path, out, rerun_workers);
    }

    ModelFile mf = load_model_file(model_path, opt.tol);
    if (app.got_subcommand(c_spec)) return do_spectrum(mf, opt, out);
    if (app.got_subcommand(c_sim)) {
      opt.workers = resolve_workers(opt.workers, sim_workers->count() > 0);
      return do_simulate(mf, opt, out);
    }
    if (app.got_subcommand(c_lim)) return do_limits(mf, opt, out);
    if (app.got_subcommand(c_ver)) {
      opt.workers = resolve_workers(opt.workers, ver_workers->count() > 0);
      return do_verify(mf, opt, out);
    }
    return 2;
  } catch (const Error& e) {
    std::cerr << "urnclt: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "urnclt: unexpected failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace urnclt
