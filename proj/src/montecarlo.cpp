#include "urnclt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>
#include <utility>

namespace urnclt {

namespace {

std::vector<std::int64_t> eval_points_for(const EnsembleConfig& c) {
  std::vector<std::int64_t> pts = c.checkpoints;
  if (pts.empty() || pts.back() != c.horizon) pts.push_back(c.horizon);
  return pts;
}

std::string num_detail(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

double median_of(Vec v) {
  if (v.empty()) fail(ErrorKind::Domain, "median of an empty sample");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

void EnsembleConfig::validate() const {
  if (paths < 2) fail(ErrorKind::Domain, "ensemble needs at least 2 paths");
  if (paths > 1'000'000) fail(ErrorKind::Domain, "ensemble paths capped at 1e6");
  if (horizon < 2 || horizon > kMaxHorizon)
    fail(ErrorKind::Domain, "ensemble horizon must lie in [2, 1e8]");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 2)
      fail(ErrorKind::Domain, "ensemble checkpoints must be >= 2");
    if (checkpoints[i] > horizon)
      fail(ErrorKind::Domain, "ensemble checkpoints must not exceed the horizon");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      fail(ErrorKind::Domain, "ensemble checkpoints must be strictly increasing");
  }
  if (workers < 0 || workers > 256)
    fail(ErrorKind::Domain, "workers must lie in [0, 256]");
}

Vec EnsembleResult::column_at(std::size_t eval_index, int stat_index) const {
  const Matrix& m = samples[eval_index];
  Vec out(static_cast<std::size_t>(m.rows()));
  for (int p = 0; p < m.rows(); ++p) out[static_cast<std::size_t>(p)] = m(p, stat_index);
  return out;
}

EnsembleResult run_ensemble(const UrnModel& model, const EnsembleConfig& config) {
  config.validate();
  const std::vector<std::int64_t> points = eval_points_for(config);
  const int k = model.colors();
  const int stats_dim = k - 1;
  const std::int64_t m = config.paths;

  std::vector<BlockNormalizers> norms;
  norms.reserve(points.size());
  for (std::int64_t n : points) norms.push_back(normalizers_at(model, n));

  EnsembleResult out;
  out.eval_points = points;
  out.paths = m;
  out.samples.assign(points.size(), Matrix(static_cast<int>(m), stats_dim));
  out.final_states = Matrix(static_cast<int>(m), k);

  int workers = config.workers > 0 ? config.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<std::int64_t>(workers, m));

  auto run_range = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      Trajectory traj = simulate_stream(model, config.horizon, points,
                                        RngStream::for_path(config.base_seed,
                                                            static_cast<std::uint64_t>(p)));
      for (std::size_t e = 0; e < points.size(); ++e) {
        Vec stats = normalized_statistics(model, traj.states[e], norms[e]);
        for (int s = 0; s < stats_dim; ++s)
          out.samples[e](static_cast<int>(p), s) = stats[static_cast<std::size_t>(s)];
      }
      const Vec& last = traj.states.back();
      for (int c = 0; c < k; ++c) out.final_states(static_cast<int>(p), c) = last[static_cast<std::size_t>(c)];
    }
  };

  if (workers == 1) {
    run_range(0, m);
    return out;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::int64_t chunk = (m + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    std::int64_t lo = t * chunk;
    std::int64_t hi = std::min<std::int64_t>(m, lo + chunk);
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
  return out;
}

double normal_cdf(double x, double variance) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

KsResult ks_gaussian(Vec samples, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    fail(ErrorKind::DegenerateVariance, "KS test needs a positive finite variance");
  if (samples.size() < 100)
    fail(ErrorKind::Domain, "KS test needs at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = normal_cdf(samples[i], variance);
    double lo = static_cast<double>(i) / m;
    double hi = static_cast<double>(i + 1) / m;
    d = std::max({d, hi - f, f - lo});
  }
  KsResult out;
  out.d = d;
  out.m = static_cast<std::int64_t>(samples.size());
  out.threshold = 1.628 / std::sqrt(m);
  out.pass = d < out.threshold;
  return out;
}

CorrelationResult cross_regime_independence(const UrnModel& model,
                                            const EnsembleResult& ens) {
  if (ens.paths < 100)
    fail(ErrorKind::Domain, "independence check needs at least 100 paths");
  const Matrix& s = ens.samples.back();
  const int dim = s.cols();

  std::vector<Regime> col_regime(static_cast<std::size_t>(dim));
  for (int c = 0; c < dim; ++c)
    col_regime[static_cast<std::size_t>(c)] =
        model.regimes[static_cast<std::size_t>(model.block_index_of_column(c + 1))];
  bool two_regimes = false;
  for (int c = 1; c < dim; ++c)
    if (col_regime[static_cast<std::size_t>(c)] != col_regime[0]) two_regimes = true;
  if (!two_regimes)
    fail(ErrorKind::Domain, "independence check needs at least two regimes");

  const int m = s.rows();
  Vec mean(static_cast<std::size_t>(dim), 0.0);
  for (int p = 0; p < m; ++p)
    for (int c = 0; c < dim; ++c) mean[static_cast<std::size_t>(c)] += s(p, c);
  for (double& v : mean) v /= static_cast<double>(m);

  Matrix cov(dim, dim);
  for (int p = 0; p < m; ++p)
    for (int a = 0; a < dim; ++a) {
      double da = s(p, a) - mean[static_cast<std::size_t>(a)];
      for (int b = a; b < dim; ++b)
        cov(a, b) += da * (s(p, b) - mean[static_cast<std::size_t>(b)]);
    }

  CorrelationResult out;
  out.threshold = 4.0 / std::sqrt(static_cast<double>(m));
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      if (col_regime[static_cast<std::size_t>(a)] == col_regime[static_cast<std::size_t>(b)])
        continue;
      double denom = std::sqrt(cov(a, a) * cov(b, b));
      double rho = denom > 0.0 ? cov(a, b) / denom : 0.0;
      out.entries.push_back({a, b, rho});
      out.max_abs_rho = std::max(out.max_abs_rho, std::fabs(rho));
    }
  out.pass = out.max_abs_rho < out.threshold;
  return out;
}

MartingaleGapResult martingale_convergence_check(const EnsembleResult& ens,
                                                 int stat_index) {
  if (ens.eval_points.size() < 3)
    fail(ErrorKind::Domain,
         "martingale check needs at least 2 checkpoints below the horizon");
  const std::size_t last = ens.eval_points.size() - 1;
  MartingaleGapResult out;
  Vec z_last = ens.column_at(last, stat_index);
  for (std::size_t e = 0; e + 1 < ens.eval_points.size(); ++e) {
    Vec z = ens.column_at(e, stat_index);
    Vec gaps(z.size());
    double mx = 0.0;
    for (std::size_t p = 0; p < z.size(); ++p) {
      gaps[p] = std::fabs(z[p] - z_last[p]);
      mx = std::max(mx, gaps[p]);
    }
    out.ns.push_back(ens.eval_points[e]);
    out.max_gap.push_back(mx);
    out.median_gap.push_back(median_of(std::move(gaps)));
  }
  double decades = std::log10(static_cast<double>(out.ns.back()) /
                              static_cast<double>(out.ns.front()));
  out.required_ratio = std::max(2.0, std::pow(2.0, decades));
  double med_first = out.median_gap.front();
  double med_last = out.median_gap.back();
  out.pass = med_last == 0.0 || med_first >= out.required_ratio * med_last;
  return out;
}

StrongLawResult strong_law_check(const UrnModel& model, const EnsembleResult& ens,
                                 double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::Domain, "strong-law delta must be positive");
  StrongLawResult out;
  out.delta = delta;
  const int k = model.colors();
  const double total = static_cast<double>(ens.eval_points.back()) + model.w0();
  std::int64_t hits = 0;
  for (int p = 0; p < ens.final_states.rows(); ++p) {
    double dev = 0.0;
    for (int c = 0; c < k; ++c)
      dev = std::max(dev, std::fabs(ens.final_states(p, c) / total - model.pi[c]));
    if (dev < delta) ++hits;
  }
  out.fraction = static_cast<double>(hits) / static_cast<double>(ens.final_states.rows());
  out.pass = out.fraction >= out.min_fraction;
  return out;
}

std::vector<UrnState> random_states(const UrnModel& model, int count,
                                    std::uint64_t seed) {
  if (count < 1) fail(ErrorKind::Domain, "state count must be positive");
  const int k = model.colors();
  const double w0 = model.w0();
  RngStream rng = RngStream::for_path(seed, 0xA11CE);
  std::vector<UrnState> out;
  out.reserve(static_cast<std::size_t>(count));
  const double lo = std::log(2.0), hi = std::log(2048.0);
  for (int i = 0; i < count; ++i) {
    UrnState st;
    st.n = static_cast<std::int64_t>(std::floor(std::exp(lo + (hi - lo) * rng.next_double())));
    if (st.n < 2) st.n = 2;
    st.w0 = w0;
    st.w.resize(static_cast<std::size_t>(k));
    st.comp.assign(static_cast<std::size_t>(k), 0.0);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      st.w[static_cast<std::size_t>(c)] = 0.05 + rng.next_double();
      sum += st.w[static_cast<std::size_t>(c)];
    }
    double scale = st.total() / sum;
    for (int c = 0; c < k; ++c) st.w[static_cast<std::size_t>(c)] *= scale;
    out.push_back(std::move(st));
  }
  return out;
}

namespace {

struct ExactMoments {
  // Per eval point: exact means for every statistic, exact variances for
  // scalar real columns (NaN elsewhere).
  std::vector<Vec> means;
  std::vector<Vec> vars;
  std::vector<int> scalar_cols;  // combination column ids with exact vars
};

ExactMoments exact_moments(const UrnModel& model,
                           const std::vector<std::int64_t>& points) {
  const int k = model.colors();
  ExactMoments out;
  std::vector<std::pair<int, int>> pairs;
  for (int col = 1; col < k; ++col) {
    const auto& b = model.block_of_column(col);
    if (b.kind == BlockKind::Real && b.d == 1) {
      out.scalar_cols.push_back(col);
      pairs.emplace_back(col, col);
    }
  }
  MomentRecursion rec(model, pairs);
  for (std::int64_t n : points) {
    rec.advance_to(n);
    BlockNormalizers norms = normalizers_at(model, n);
    out.means.push_back(normalized_statistics(model, rec.mean_state(), norms));
    Vec vars(static_cast<std::size_t>(k - 1), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < out.scalar_cols.size(); ++i) {
      int col = out.scalar_cols[i];
      std::size_t bi = static_cast<std::size_t>(model.block_index_of_column(col));
      const auto& b = model.spec.blocks[bi];
      double mult;
      if (model.regimes[bi] == Regime::Supercritical)
        mult = norms.a_inv[bi](col - b.col_begin, col - b.col_begin);
      else
        mult = norms.scalar[bi];
      vars[static_cast<std::size_t>(col - 1)] = rec.central_second_moment(i) * mult * mult;
    }
    out.vars.push_back(std::move(vars));
  }
  return out;
}

CheckResult make_check(std::string name, bool pass, double observed, double threshold,
                       std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.pass = pass;
  c.observed = observed;
  c.threshold = threshold;
  c.detail = std::move(detail);
  return c;
}

}  // namespace

VerificationReport verify(const UrnModel& model, const EnsembleConfig& config,
                          const VerifyOptions& options) {
  config.validate();
  if (config.horizon > kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "verify horizon capped at 1e7 (exact moment recursion)");
  if (!(options.tamper_variance_factor > 0.0))
    fail(ErrorKind::Domain, "variance tamper factor must be positive");

  VerificationReport rep;
  rep.base_seed = config.base_seed;
  rep.paths = config.paths;
  rep.horizon = config.horizon;
  rep.labels = stat_labels(model);
  rep.tamper_variance_factor = options.tamper_variance_factor;
  const double tamper = options.tamper_variance_factor;

  rep.limits = limit_covariance(model, options.cross_horizon);

  EnsembleResult ens = run_ensemble(model, config);
  rep.eval_points = ens.eval_points;

  ExactMoments exact = exact_moments(model, ens.eval_points);

  const int dim = model.colors() - 1;
  const double m = static_cast<double>(ens.paths);
  std::vector<Vec> emp_mean(ens.eval_points.size()), emp_var(ens.eval_points.size());
  std::vector<Vec> emp_m4(ens.eval_points.size());
  for (std::size_t e = 0; e < ens.eval_points.size(); ++e) {
    const Matrix& s = ens.samples[e];
    Vec mu(static_cast<std::size_t>(dim), 0.0), va(static_cast<std::size_t>(dim), 0.0),
        m4(static_cast<std::size_t>(dim), 0.0);
    for (int p = 0; p < s.rows(); ++p)
      for (int c = 0; c < dim; ++c) mu[static_cast<std::size_t>(c)] += s(p, c);
    for (double& v : mu) v /= m;
    for (int p = 0; p < s.rows(); ++p)
      for (int c = 0; c < dim; ++c) {
        double d = s(p, c) - mu[static_cast<std::size_t>(c)];
        va[static_cast<std::size_t>(c)] += d * d;
        m4[static_cast<std::size_t>(c)] += d * d * d * d;
      }
    for (double& v : va) v /= (m - 1.0);
    for (double& v : m4) v /= m;
    emp_mean[e] = std::move(mu);
    emp_var[e] = std::move(va);
    emp_m4[e] = std::move(m4);

    StatTable table;
    table.n = ens.eval_points[e];
    table.emp_mean = emp_mean[e];
    table.emp_var = emp_var[e];
    table.exact_mean = exact.means[e];
    table.exact_var = exact.vars[e];
    rep.tables.push_back(std::move(table));
  }

  auto add = [&rep](CheckResult c) { rep.checks.push_back(std::move(c)); };

  // Sample means vs the exact recursion, every statistic and checkpoint.
  for (std::size_t e = 0; e < ens.eval_points.size(); ++e)
    for (int c = 0; c < dim; ++c) {
      double diff = std::fabs(emp_mean[e][static_cast<std::size_t>(c)] -
                              exact.means[e][static_cast<std::size_t>(c)]);
      double sd = std::sqrt(std::max(emp_var[e][static_cast<std::size_t>(c)], 0.0));
      double thr = sd > 0.0
                       ? 4.0 * sd / std::sqrt(m)
                       : 1e-12 * std::max(1.0, std::fabs(exact.means[e][static_cast<std::size_t>(c)]));
      add(make_check("mean[" + rep.labels[static_cast<std::size_t>(c)] + "@" +
                         std::to_string(ens.eval_points[e]) + "]",
                     diff <= thr, diff, thr,
                     "emp=" + num_detail(emp_mean[e][static_cast<std::size_t>(c)]) +
                         " exact=" + num_detail(exact.means[e][static_cast<std::size_t>(c)])));
    }

  // Sample variances vs the exact recursion (scalar real columns).
  for (std::size_t e = 0; e < ens.eval_points.size(); ++e)
    for (int col : exact.scalar_cols) {
      int c = col - 1;
      double target = exact.vars[e][static_cast<std::size_t>(c)] * tamper;
      double v = emp_var[e][static_cast<std::size_t>(c)];
      double se = std::sqrt(std::max(emp_m4[e][static_cast<std::size_t>(c)] - v * v, 0.0) / m);
      double thr = se > 0.0 ? 4.0 * se : 1e-12 * std::max(1.0, target);
      double diff = std::fabs(v - target);
      add(make_check("var[" + rep.labels[static_cast<std::size_t>(c)] + "@" +
                         std::to_string(ens.eval_points[e]) + "]",
                     diff <= thr, diff, thr,
                     "emp=" + num_detail(v) + " exact=" + num_detail(target)));
    }

  // Normality at the horizon for sub/critical scalar real columns, against
  // the exact finite-n variance (centered by the exact finite-n mean).
  const std::size_t last = ens.eval_points.size() - 1;
  for (int col : exact.scalar_cols) {
    std::size_t bi = static_cast<std::size_t>(model.block_index_of_column(col));
    if (model.regimes[bi] == Regime::Supercritical) continue;
    int c = col - 1;
    double variance = exact.vars[last][static_cast<std::size_t>(c)] * tamper;
    if (!(variance > 1e-30)) {
      rep.notes.push_back("ks[" + rep.labels[static_cast<std::size_t>(c)] +
                          "] skipped: degenerate variance");
      continue;
    }
    Vec col_samples = ens.column_at(last, c);
    double center = exact.means[last][static_cast<std::size_t>(c)];
    for (double& x : col_samples) x -= center;
    KsResult ks = ks_gaussian(std::move(col_samples), variance);
    add(make_check("ks[" + rep.labels[static_cast<std::size_t>(c)] + "@" +
                       std::to_string(ens.eval_points[last]) + "]",
                   ks.pass, ks.d, ks.threshold, "variance=" + num_detail(variance)));
  }

  // Cross-regime independence at the horizon.
  {
    bool two = false;
    for (std::size_t i = 1; i < model.regimes.size(); ++i)
      if (model.regimes[i] != model.regimes[0]) two = true;
    if (two && ens.paths >= 100) {
      CorrelationResult corr = cross_regime_independence(model, ens);
      std::string detail;
      for (const auto& ent : corr.entries) {
        if (!detail.empty()) detail += " ";
        detail += rep.labels[static_cast<std::size_t>(ent.stat_a)] + "/" +
                  rep.labels[static_cast<std::size_t>(ent.stat_b)] + "=" +
                  num_detail(ent.rho);
      }
      add(make_check("independence@" + std::to_string(ens.eval_points[last]), corr.pass,
                     corr.max_abs_rho, corr.threshold, detail));
    } else {
      rep.notes.push_back("independence skipped: fewer than two regimes present");
    }
  }

  // Martingale gap shrinkage for supercritical scalar columns.
  if (ens.eval_points.size() >= 3) {
    for (int col : exact.scalar_cols) {
      std::size_t bi = static_cast<std::size_t>(model.block_index_of_column(col));
      if (model.regimes[bi] != Regime::Supercritical) continue;
      int c = col - 1;
      MartingaleGapResult mg = martingale_convergence_check(ens, c);
      std::string detail;
      for (std::size_t i = 0; i < mg.ns.size(); ++i) {
        if (!detail.empty()) detail += " ";
        detail += "median@" + std::to_string(mg.ns[i]) + "=" + num_detail(mg.median_gap[i]);
      }
      double ratio = mg.median_gap.back() > 0.0
                         ? mg.median_gap.front() / mg.median_gap.back()
                         : std::numeric_limits<double>::infinity();
      add(make_check("martingale[" + rep.labels[static_cast<std::size_t>(c)] + "]",
                     mg.pass, ratio, mg.required_ratio, detail));
    }
  } else {
    rep.notes.push_back("martingale check skipped: fewer than 2 checkpoints below horizon");
  }

  // Strong law at the horizon.
  {
    StrongLawResult sl = strong_law_check(model, ens, options.strong_law_delta);
    add(make_check("strong_law@" + std::to_string(ens.eval_points[last]), sl.pass,
                   sl.fraction, sl.min_fraction, "delta=" + num_detail(sl.delta)));
  }

  // Exact finite-n critical variances must trend monotonically toward the
  // asymptote (the O(1/log n) bias shrinks with n).
  for (int col : exact.scalar_cols) {
    std::size_t bi = static_cast<std::size_t>(model.block_index_of_column(col));
    if (model.regimes[bi] != Regime::Critical) continue;
    if (ens.eval_points.size() < 2) continue;
    int c = col - 1;
    int pos = -1;
    for (std::size_t i = 0; i < rep.limits.crit_cols.size(); ++i)
      if (rep.limits.crit_cols[i] == col) pos = static_cast<int>(i);
    double asym = rep.limits.critical.matrix(pos, pos) * tamper;
    bool monotone = true;
    double prev_gap = std::fabs(exact.vars[0][static_cast<std::size_t>(c)] - asym);
    std::string detail = "asymptote=" + num_detail(asym);
    for (std::size_t e = 1; e < ens.eval_points.size(); ++e) {
      double gap = std::fabs(exact.vars[e][static_cast<std::size_t>(c)] - asym);
      if (gap > prev_gap + 1e-12 * std::max(1.0, asym)) monotone = false;
      prev_gap = gap;
    }
    double final_gap = prev_gap;
    add(make_check("critical_trend[" + rep.labels[static_cast<std::size_t>(c)] + "]",
                   monotone, final_gap, 0.0, detail));
  }

  // Conditional-moment oracle agreement on random mid-path states.
  {
    std::vector<UrnState> states = random_states(model, options.oracle_states,
                                                 options.oracle_seed);
    double worst = 0.0;
    std::int64_t worst_n = 0;
    for (const auto& st : states)
      for (int a = 1; a < model.colors(); ++a)
        for (int b = a; b < model.colors(); ++b) {
          ConditionalMomentPair pr = one_step_conditional_moments(model, st, a, b);
          if (pr.max_rel_gap > worst) {
            worst = pr.max_rel_gap;
            worst_n = st.n;
          }
        }
    add(make_check("moment_oracle", worst <= 1e-12, worst, 1e-12,
                   "states=" + std::to_string(options.oracle_states) +
                       " worst_n=" + std::to_string(worst_n)));
  }

  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace urnclt
