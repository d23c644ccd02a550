// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Usage: urnclt_acceptance <urnclt-binary> <models-dir> <work-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "urnclt/cli.hpp"
#include "urnclt/limits.hpp"
#include "urnclt/model_io.hpp"
#include "urnclt/montecarlo.hpp"

using namespace urnclt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(int num, bool pass, const std::string& detail, double seconds) {
  if (!pass) g_failures += 1;
  std::printf("criterion %d: %s  %s (%.1f s)\n", num, pass ? "PASS" : "FAIL",
              detail.c_str(), seconds);
  std::fflush(stdout);
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return std::string(buf);
}

double sample_mean(const Vec& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_var(const Vec& xs) {
  double m = sample_mean(xs), s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double gamma_cross(double li, double lj, double pi_xx) {
  return li * lj * pi_xx / (li + lj - 1.0) *
         std::exp(std::lgamma(1.0 + li) + std::lgamma(1.0 + lj) -
                  std::lgamma(1.0 + li + lj));
}

int run_cmd(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

bool check_named(const VerificationReport& rep, const std::string& name,
                 double* observed = nullptr) {
  for (const auto& c : rep.checks)
    if (c.name == name) {
      if (observed) *observed = c.observed;
      return c.pass;
    }
  return false;
}

// --- criteria -----------------------------------------------------------

void criterion_1(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "all_regime_4color.json").string());
  auto states = random_states(mf.model, 1000, 20240814);
  double worst = 0.0;
  for (const auto& st : states)
    for (int a = 1; a < mf.model.colors(); ++a)
      for (int b = a; b < mf.model.colors(); ++b) {
        auto pair = one_step_conditional_moments(mf.model, st, a, b);
        worst = std::max(worst, pair.max_rel_gap);
      }
  double secs = t.seconds();
  bool pass = worst <= 1e-12 && secs < 1.0;
  line(1, pass, "conditional moments on 1000 random states, max rel gap " + fmt(worst),
       secs);
}

void criterion_2(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "two_color_sub.json").string());

  double lyap = limit_covariance(mf.model).subcritical(0, 0);
  // Independent oracle: adaptive quadrature of the scalar integral
  // lambda^2 <pi, xi^2> e^{-(1-2 lambda) x} on [0, T].
  double quad = integrate([](double x) { return 0.04 * std::exp(-0.6 * x); }, 0.0,
                          140.0, 1e-13);
  bool quad_ok = std::abs(lyap - quad) <= 1e-8;
  bool exact_ok = std::abs(lyap - 1.0 / 15.0) <= 1e-10;

  EnsembleConfig cfg;
  cfg.paths = 10'000;
  cfg.horizon = 100'000;
  cfg.checkpoints = {100'000};
  cfg.base_seed = 1002;
  auto ens = run_ensemble(mf.model, cfg);
  double v = sample_var(ens.column_at(0, 0));

  MomentRecursion rec(mf.model, {{1, 1}});
  rec.advance_to(100'000);
  double exact = rec.central_second_moment(0) / 100'000.0;
  double se = exact * std::sqrt(2.0 / static_cast<double>(cfg.paths - 1));
  bool mc_ok = std::abs(v - exact) <= 3.0 * se;
  bool asym_ok = std::abs(v - 1.0 / 15.0) <= 0.06 / 15.0;

  bool pass = quad_ok && exact_ok && mc_ok && asym_ok;
  line(2, pass,
       "subcritical variance: lyapunov " + fmt(lyap) + ", quadrature gap " +
           fmt(std::abs(lyap - quad)) + ", MC var " + fmt(v) + " vs exact " +
           fmt(exact) + " (3SE " + fmt(3.0 * se) + ")",
       t.seconds());
}

void criterion_3(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "two_color_critical.json").string());

  EnsembleConfig cfg;
  cfg.paths = 10'000;
  cfg.horizon = 100'000;
  cfg.checkpoints = {1'000, 10'000, 100'000};
  cfg.base_seed = 1003;
  auto ens = run_ensemble(mf.model, cfg);

  MomentRecursion rec(mf.model, {{1, 1}});
  bool per_point = true;
  std::vector<double> exact_gap;
  std::string detail;
  for (std::size_t k = 0; k < ens.eval_points.size(); ++k) {
    std::int64_t n = ens.eval_points[k];
    rec.advance_to(n);
    double norm = static_cast<double>(n) * std::log(static_cast<double>(n));
    double exact = rec.central_second_moment(0) / norm;
    double v = sample_var(ens.column_at(k, 0));
    double se = exact * std::sqrt(2.0 / static_cast<double>(cfg.paths - 1));
    if (std::abs(v - exact) > 3.0 * se) per_point = false;
    exact_gap.push_back(std::abs(exact - 0.25));
    if (k + 1 == ens.eval_points.size())
      detail = "critical variance at n=1e5: MC " + fmt(v) + " vs exact " + fmt(exact);
  }
  bool monotone = exact_gap[0] > exact_gap[1] && exact_gap[1] > exact_gap[2];

  bool pass = per_point && monotone;
  line(3, pass,
       detail + ", exact gap to 0.25 shrinks " + fmt(exact_gap[0]) + " > " +
           fmt(exact_gap[1]) + " > " + fmt(exact_gap[2]),
       t.seconds());
}

void criterion_4() {
  Timer t;
  bool pass = true;
  double final_real = 0.0, final_cplx = 0.0;

  std::vector<std::int64_t> grid = {10'000, 100'000, 1'000'000};
  double prev = 1e300;
  for (std::int64_t n : grid) {
    double s = critical_coefficient_sum(2, BlockKind::Real, 0.0, n, 100);
    double err = std::abs(s - 1.0 / 3.0);
    if (err > prev) pass = false;
    prev = err;
    final_real = s;
  }
  if (std::abs(final_real - 1.0 / 3.0) > 0.05 / 3.0) pass = false;

  prev = 1e300;
  for (std::int64_t n : grid) {
    double s = critical_coefficient_sum(1, BlockKind::ComplexPair, 0.85, n, 100);
    double err = std::abs(s - 0.5);
    if (err > prev) pass = false;
    prev = err;
    final_cplx = s;
  }
  if (std::abs(final_cplx - 0.5) > 0.05 * 0.5) pass = false;

  double secs = t.seconds();
  if (secs >= 30.0) pass = false;
  line(4, pass,
       "coefficient sums at n=1e6: real d=2 " + fmt(final_real) + " vs 1/3, complex " +
           fmt(final_cplx) + " vs 0.5, both monotone",
       secs);
}

void criterion_5(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "all_regime_4color.json").string());

  EnsembleConfig cfg;  // defaults: 1e4 paths, horizon 1e5, seed 42
  VerifyOptions opt;
  auto rep = verify(mf.model, cfg, opt);

  double ks_x = 0.0, ks_y = 0.0, rho = 0.0;
  bool ok_x = check_named(rep, "ks[X1@100000]", &ks_x);
  bool ok_y = check_named(rep, "ks[Y1@100000]", &ks_y);
  bool ok_i = check_named(rep, "independence@100000", &rho);

  bool pass = ok_x && ok_y && ok_i;
  line(5, pass,
       "all-regime normality: KS D " + fmt(ks_x) + " (sub) / " + fmt(ks_y) +
           " (crit) vs 0.01628, max |rho| " + fmt(rho) + " vs 0.04",
       t.seconds());
}

void criterion_6(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "two_color_super_fast.json").string());

  auto curve = l2_bound_curve(mf.model, 1, 1'000'000, 100'000);
  bool nondecreasing = true;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].second < curve[i - 1].second - 1e-12) nondecreasing = false;
  double limit = gamma_cross(0.875, 0.875, 1.0);
  bool bounded = curve.back().second <= limit + 1e-9;

  MomentRecursion rec(mf.model, {{1, 1}});
  rec.advance_to(999'999);
  const auto& block = mf.model.block_of_column(1);
  double am = an_product(block, 999'999).a_inv(0, 0);
  double before = rec.second_moment(0) * am * am;
  rec.advance_to(1'000'000);
  double an = an_product(block, 1'000'000).a_inv(0, 0);
  double after = rec.second_moment(0) * an * an;
  double increment = std::abs(after - before);
  bool cauchy = increment < 1e-10;

  EnsembleConfig cfg;
  cfg.paths = 2'000;
  cfg.horizon = 100'000;
  cfg.checkpoints = {1'000, 10'000, 100'000};
  cfg.base_seed = 1006;
  auto ens = run_ensemble(mf.model, cfg);
  auto mg = martingale_convergence_check(ens, 0);

  bool pass = nondecreasing && bounded && cauchy && mg.pass;
  line(6, pass,
       "martingale: E Z^2 increment " + fmt(increment) + " at n=1e6, bound " +
           fmt(curve.back().second) + " <= " + fmt(limit) + ", median gap ratio >= " +
           fmt(mg.required_ratio),
       t.seconds());
}

void criterion_7(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "two_super_3color.json").string());

  auto full = supercritical_cross_limit(mf.model, 1, 2, 1'000'000);
  auto half = supercritical_cross_limit(mf.model, 1, 2, 500'000);
  bool nonzero = std::abs(full.value) > 0.05 &&
                 std::abs(full.value) > 10.0 * full.tail_bound;
  bool stable = std::abs(full.value - half.value) <= half.tail_bound;

  EnsembleConfig cfg;
  cfg.paths = 10'000;
  cfg.horizon = 100'000;
  cfg.checkpoints = {100'000};
  cfg.base_seed = 1007;
  auto ens = run_ensemble(mf.model, cfg);
  Vec u = ens.column_at(0, 0), v = ens.column_at(0, 1);
  Vec prod(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) prod[i] = u[i] * v[i];
  double pm = sample_mean(prod);
  double psd = std::sqrt(sample_var(prod));

  MomentRecursion rec(mf.model, {{1, 2}});
  rec.advance_to(100'000);
  double a1 = an_product(mf.model.block_of_column(1), 100'000).a_inv(0, 0);
  double a2 = an_product(mf.model.block_of_column(2), 100'000).a_inv(0, 0);
  double exact = rec.second_moment(0) * a1 * a2;
  double se = psd / std::sqrt(static_cast<double>(cfg.paths));
  bool mc_ok = std::abs(pm - exact) <= 3.0 * se;

  bool pass = nonzero && stable && mc_ok;
  line(7, pass,
       "cross moment limit " + fmt(full.value) + " (tail " + fmt(full.tail_bound) +
           "), MC E[UV] " + fmt(pm) + " vs exact " + fmt(exact) + " (3SE " +
           fmt(3.0 * se) + ")",
       t.seconds());
}

void criterion_8(const fs::path& models) {
  Timer t;
  auto mf = load_model_file((models / "super_d2.json").string());
  const auto& block = mf.model.spec.blocks[0];

  std::vector<std::int64_t> grid = {1'000,   3'162,   10'000,  31'623,
                                    100'000, 316'228, 1'000'000};
  AnAccumulator acc(block);
  double c_ref = 0.0;
  bool pass = true;
  double lo = 1e300, hi = 0.0;
  for (std::int64_t n : grid) {
    acc.advance_to(n);
    Matrix inv = acc.inverse();
    double maxe = 0.0;
    for (int i = 0; i < inv.rows(); ++i)
      for (int j = 0; j < inv.cols(); ++j) maxe = std::max(maxe, std::abs(inv(i, j)));
    double nn = static_cast<double>(n);
    double ratio = maxe / (std::pow(nn, -0.75) * std::log(nn));
    if (n == grid.front()) c_ref = ratio;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (ratio < 0.5 * c_ref || ratio > 2.0 * c_ref) pass = false;
  }
  line(8, pass,
       "A_n^-1 max entry / (n^-0.75 log n) stays in [" + fmt(lo) + ", " + fmt(hi) +
           "] around C=" + fmt(c_ref),
       t.seconds());
}

void criterion_9(const std::string& urnclt, const fs::path& models,
                 const fs::path& work) {
  Timer t;
  fs::path w1 = work / "c9_w1", w8 = work / "c9_w8", rr = work / "c9_rerun";
  fs::remove_all(w1);
  fs::remove_all(w8);
  fs::remove_all(rr);

  std::string model = (models / "two_color_sub.json").string();
  std::string base = "'" + urnclt +
                     "' verify '" + model +
                     "' --horizon 20000 --checkpoints 2000,20000 --paths 2000 "
                     "--seed 42 --cross-horizon 200000 > /dev/null";
  int rc1 = run_cmd(base + " --workers 1 --out-dir '" + w1.string() + "'");
  int rc8 = run_cmd(base + " --workers 8 --out-dir '" + w8.string() + "'");
  int rcr = run_cmd("'" + urnclt + "' rerun '" + (w1 / "manifest.json").string() +
                    "' --workers 3 --out-dir '" + rr.string() + "' > /dev/null");

  bool ran = rc1 == 0 && rc8 == 0 && rcr == 0;
  bool identical = false;
  if (ran) {
    std::string r1 = read_text_file((w1 / "report.json").string());
    identical = r1 == read_text_file((w8 / "report.json").string()) &&
                r1 == read_text_file((rr / "report.json").string());
  }
  bool pass = ran && identical;
  line(9, pass,
       std::string("reports byte-identical across workers 1/8 and manifest rerun: ") +
           (identical ? "yes" : "no"),
       t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <urnclt-binary> <models-dir> <work-dir>\n",
                 argv[0]);
    return 2;
  }
  std::string urnclt = argv[1];
  fs::path models = argv[2];
  fs::path work = argv[3];
  fs::create_directories(work);

  criterion_1(models);
  criterion_2(models);
  criterion_3(models);
  criterion_4();
  criterion_5(models);
  criterion_6(models);
  criterion_7(models);
  criterion_8(models);
  criterion_9(urnclt, models, work);

  std::printf("acceptance: %d/9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
