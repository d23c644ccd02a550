#include "urnclt/limits.hpp"

#include <cmath>
#include <limits>

namespace urnclt {

namespace {

Matrix matrix_power(const Matrix& a, int p) {
  Matrix out = Matrix::identity(a.rows());
  for (int i = 0; i < p; ++i) out = out * a;
  return out;
}

Matrix diag_pi(const ProbabilityVector& pi) {
  Matrix d(pi.size(), pi.size());
  for (int i = 0; i < pi.size(); ++i) d(i, i) = pi[i];
  return d;
}

std::vector<std::size_t> blocks_in_regime(const UrnModel& model, Regime r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.spec.blocks.size(); ++i)
    if (model.regimes[i] == r) out.push_back(i);
  return out;
}

std::vector<int> regime_columns(const UrnModel& model, Regime r) {
  std::vector<int> cols;
  for (std::size_t bi : blocks_in_regime(model, r)) {
    const auto& b = model.spec.blocks[bi];
    for (int c = b.col_begin; c < b.col_end(); ++c) cols.push_back(c);
  }
  return cols;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_scalar_super(const UrnModel& model, int col) {
  if (col < 1 || col >= model.colors())
    fail(ErrorKind::Domain, "column index out of range");
  int bi = model.block_index_of_column(col);
  if (model.regimes[static_cast<std::size_t>(bi)] != Regime::Supercritical)
    fail(ErrorKind::NotSupercritical, "column does not belong to a supercritical block");
  const auto& b = model.spec.blocks[static_cast<std::size_t>(bi)];
  if (b.kind != BlockKind::Real || b.d != 1)
    fail(ErrorKind::NotScalarBlock,
         "exact supercritical limits need a scalar real block (d = 1)");
}

}  // namespace

Matrix limit_cov_subcritical(const UrnModel& model) {
  auto bis = blocks_in_regime(model, Regime::Subcritical);
  if (bis.empty()) fail(ErrorKind::Domain, "model has no subcritical block");
  const int k = model.colors();
  int total = 0;
  for (std::size_t bi : bis) total += model.spec.blocks[bi].dim();

  Matrix g(total, total);
  Matrix s(k, total);
  int off = 0;
  for (std::size_t bi : bis) {
    const auto& b = model.spec.blocks[bi];
    Matrix lm = b.lambda_matrix();
    for (int i = 0; i < lm.rows(); ++i)
      for (int j = 0; j < lm.cols(); ++j) g(off + i, off + j) = lm(i, j);
    Matrix cols = model.spec.block_columns(b);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < cols.cols(); ++j) s(i, off + j) = cols(i, j);
    off += b.dim();
  }

  Matrix q = g.transpose() * s.transpose() * diag_pi(model.pi) * s * g;
  Matrix a = Matrix::identity(total);
  a *= 0.5;
  a -= g;
  return solve_lyapunov(a, q);
}

double critical_coefficient(int d, BlockKind kind) {
  if (d < 1) fail(ErrorKind::Domain, "block chain length d must be >= 1");
  double f = factorial(d - 1);
  double c = 1.0 / ((2.0 * d - 1.0) * f * f);
  return kind == BlockKind::ComplexPair ? 0.5 * c : c;
}

double critical_mixed_coefficient(const JordanBlockSpec& a, const JordanBlockSpec& b) {
  double f = factorial(a.d - 1) * factorial(b.d - 1);
  double c = 1.0 / ((a.d + b.d - 1.0) * f);
  bool both_complex = a.kind == BlockKind::ComplexPair && b.kind == BlockKind::ComplexPair;
  return both_complex ? 0.5 * c : c;
}

CriticalCovariance limit_cov_critical(const UrnModel& model) {
  auto bis = blocks_in_regime(model, Regime::Critical);
  if (bis.empty()) fail(ErrorKind::Domain, "model has no critical block");
  int total = 0;
  for (std::size_t bi : bis) total += model.spec.blocks[bi].dim();

  CriticalCovariance out;
  out.matrix = Matrix(total, total);
  out.uniform_half_variant = Matrix(total, total);
  Matrix dpi = diag_pi(model.pi);

  int off_a = 0;
  for (std::size_t ai : bis) {
    const auto& ba = model.spec.blocks[ai];
    Matrix sa = model.spec.block_columns(ba);
    Matrix la = ba.lambda_matrix();
    Matrix fa = matrix_power(ba.nilpotent(), ba.d - 1);
    int off_b = 0;
    for (std::size_t bj : bis) {
      const auto& bb = model.spec.blocks[bj];
      Matrix sb = model.spec.block_columns(bb);
      Matrix lb = bb.lambda_matrix();
      Matrix fb = matrix_power(bb.nilpotent(), bb.d - 1);

      Matrix x = la.transpose() * sa.transpose() * dpi * sb * lb;
      Matrix w = fa.transpose() * x * fb;

      double coeff = critical_mixed_coefficient(ba, bb);
      double coeff_half = 0.5 / ((ba.d + bb.d - 1.0) * factorial(ba.d - 1) *
                                 factorial(bb.d - 1));
      for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) {
          out.matrix(off_a + i, off_b + j) = coeff * w(i, j);
          out.uniform_half_variant(off_a + i, off_b + j) = coeff_half * w(i, j);
        }
      if (ai < bj && ba.kind != bb.kind)
        out.cross_kind_pairs.emplace_back(ba.col_begin, bb.col_begin);
      off_b += bb.dim();
    }
    off_a += ba.dim();
  }
  return out;
}

double critical_coefficient_sum(int d, BlockKind kind, double lambda_c, std::int64_t n,
                                std::int64_t n0) {
  if (d < 1) fail(ErrorKind::Domain, "block chain length d must be >= 1");
  if (n0 < 2 || n <= n0) fail(ErrorKind::Domain, "need 2 <= n0 < n");
  if (kind == BlockKind::ComplexPair && !(lambda_c > 0.0))
    fail(ErrorKind::Domain, "complex-pair summation needs lambda_c > 0");
  const double log_n = std::log(static_cast<double>(n));
  const double big_u = log_n - std::log(static_cast<double>(n0));
  const double f = factorial(d - 1);
  double sum = 0.0;
  for (std::int64_t j = n0; j < n; ++j) {
    double u = log_n - std::log(static_cast<double>(j + 1));
    double base = std::pow(u, d - 1) / f;
    double w = base * base;
    if (kind == BlockKind::ComplexPair) {
      double c = std::cos(lambda_c * u);
      w *= c * c;
    }
    sum += w / static_cast<double>(j + 1);
  }
  return sum / std::pow(big_u, 2.0 * d - 1.0);
}

CrossLimit supercritical_cross_limit(const UrnModel& model, int col_i, int col_j,
                                     std::int64_t horizon) {
  require_scalar_super(model, col_i);
  require_scalar_super(model, col_j);
  if (horizon < 10 || horizon > kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "cross-limit horizon must lie in [10, 1e7]");

  const double li = column_lambda(model, col_i);
  const double lj = column_lambda(model, col_j);
  MomentRecursion rec(model, {{col_i, col_j}});

  double ai = 1.0, aj = 1.0;
  double value = rec.second_moment(0);
  double prev = value;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    rec.step();
    double inv = 1.0 / static_cast<double>(n);
    ai *= 1.0 + li * inv;
    aj *= 1.0 + lj * inv;
    prev = value;
    value = rec.second_moment(0) / (ai * aj);
  }

  CrossLimit out;
  out.value = value;
  out.last_increment = value - prev;
  out.horizon = horizon;
  double s = li + lj;  // > 1, both supercritical
  out.tail_bound = 2.0 * std::fabs(out.last_increment) *
                   static_cast<double>(horizon + 1) / (s - 1.0);
  return out;
}

std::vector<std::pair<std::int64_t, double>> l2_bound_curve(const UrnModel& model,
                                                            int col,
                                                            std::int64_t horizon,
                                                            std::int64_t stride) {
  require_scalar_super(model, col);
  if (horizon < 1 || horizon > kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "curve horizon must lie in [1, 1e7]");
  if (stride < 1) fail(ErrorKind::Domain, "stride must be >= 1");

  const double lambda = column_lambda(model, col);
  MomentRecursion rec(model, {{col, col}});
  std::vector<std::pair<std::int64_t, double>> curve;
  double a = 1.0;
  curve.emplace_back(0, rec.second_moment(0));
  for (std::int64_t n = 1; n <= horizon; ++n) {
    rec.step();
    a *= 1.0 + lambda / static_cast<double>(n);
    if (n % stride == 0 || n == horizon)
      curve.emplace_back(n, rec.second_moment(0) / (a * a));
  }
  return curve;
}

LimitCovariance limit_covariance(const UrnModel& model, std::int64_t cross_horizon) {
  if (cross_horizon < 10 || cross_horizon > kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "cross-limit horizon must lie in [10, 1e7]");
  LimitCovariance out;
  out.sub_cols = regime_columns(model, Regime::Subcritical);
  out.crit_cols = regime_columns(model, Regime::Critical);
  out.super_cols = regime_columns(model, Regime::Supercritical);
  out.cross_horizon = cross_horizon;

  if (!out.sub_cols.empty()) out.subcritical = limit_cov_subcritical(model);
  if (!out.crit_cols.empty()) out.critical = limit_cov_critical(model);

  const int ns = static_cast<int>(out.super_cols.size());
  out.supercritical = Matrix(ns, ns, std::numeric_limits<double>::quiet_NaN());
  out.supercritical_tail = Matrix(ns, ns, std::numeric_limits<double>::quiet_NaN());
  if (ns == 0) return out;

  // Scalar real supercritical columns admit the exact recursion; run one
  // combined pass for all their pairs.
  std::vector<int> scalar_idx;
  for (int i = 0; i < ns; ++i) {
    const auto& b = model.block_of_column(out.super_cols[static_cast<std::size_t>(i)]);
    if (b.kind == BlockKind::Real && b.d == 1) scalar_idx.push_back(i);
  }
  if (scalar_idx.empty()) return out;

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < scalar_idx.size(); ++a)
    for (std::size_t b = a; b < scalar_idx.size(); ++b)
      pairs.emplace_back(out.super_cols[static_cast<std::size_t>(scalar_idx[a])],
                         out.super_cols[static_cast<std::size_t>(scalar_idx[b])]);

  MomentRecursion rec(model, pairs);
  std::vector<double> a_prod(scalar_idx.size(), 1.0);
  std::vector<double> lambda(scalar_idx.size());
  for (std::size_t a = 0; a < scalar_idx.size(); ++a)
    lambda[a] = column_lambda(model, out.super_cols[static_cast<std::size_t>(scalar_idx[a])]);

  std::vector<double> value(pairs.size(), 0.0), prev(pairs.size(), 0.0);
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) value[pi] = rec.second_moment(pi);
  for (std::int64_t n = 1; n <= cross_horizon; ++n) {
    rec.step();
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t a = 0; a < a_prod.size(); ++a) a_prod[a] *= 1.0 + lambda[a] * inv;
    std::size_t pi = 0;
    for (std::size_t a = 0; a < scalar_idx.size(); ++a)
      for (std::size_t b = a; b < scalar_idx.size(); ++b, ++pi) {
        prev[pi] = value[pi];
        value[pi] = rec.second_moment(pi) / (a_prod[a] * a_prod[b]);
      }
  }

  std::size_t pi = 0;
  for (std::size_t a = 0; a < scalar_idx.size(); ++a)
    for (std::size_t b = a; b < scalar_idx.size(); ++b, ++pi) {
      double s = lambda[a] + lambda[b];
      double tail = 2.0 * std::fabs(value[pi] - prev[pi]) *
                    static_cast<double>(cross_horizon + 1) / (s - 1.0);
      int ia = scalar_idx[a], ib = scalar_idx[b];
      out.supercritical(ia, ib) = value[pi];
      out.supercritical(ib, ia) = value[pi];
      out.supercritical_tail(ia, ib) = tail;
      out.supercritical_tail(ib, ia) = tail;
    }
  return out;
}

}  // namespace urnclt
