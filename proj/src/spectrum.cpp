#include "urnclt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <utility>

namespace urnclt {

namespace {

constexpr double kOverflowGuard = 1e290;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

const char* block_kind_name(BlockKind k) {
  return k == BlockKind::Real ? "real" : "complex_pair";
}

void JordanBlockSpec::validate() const {
  if (d < 1) fail(ErrorKind::Domain, "block chain length d must be >= 1");
  if (!(std::fabs(lambda_r) < 1.0))
    fail(ErrorKind::Domain, "block lambda_r must satisfy |lambda_r| < 1");
  if (kind == BlockKind::Real) {
    if (lambda_c != 0.0) fail(ErrorKind::Domain, "real block must have lambda_c = 0");
  } else {
    if (!(lambda_c > 0.0))
      fail(ErrorKind::Domain, "complex-pair block must have lambda_c > 0");
  }
  if (col_begin < 1) fail(ErrorKind::Domain, "block columns must start at index >= 1");
}

Matrix JordanBlockSpec::lambda_matrix() const {
  const int m = dim();
  Matrix out(m, m);
  if (kind == BlockKind::Real) {
    for (int i = 0; i < m; ++i) {
      out(i, i) = lambda_r;
      if (i + 1 < m) out(i, i + 1) = 1.0;
    }
  } else {
    for (int b = 0; b < d; ++b) {
      out(2 * b, 2 * b) = lambda_r;
      out(2 * b, 2 * b + 1) = lambda_c;
      out(2 * b + 1, 2 * b) = -lambda_c;
      out(2 * b + 1, 2 * b + 1) = lambda_r;
      if (b + 1 < d) {
        out(2 * b, 2 * b + 2) = 1.0;
        out(2 * b + 1, 2 * b + 3) = 1.0;
      }
    }
  }
  return out;
}

Matrix JordanBlockSpec::nilpotent() const {
  const int m = dim();
  Matrix out(m, m);
  if (kind == BlockKind::Real) {
    for (int i = 0; i + 1 < m; ++i) out(i, i + 1) = 1.0;
  } else {
    for (int b = 0; b + 1 < d; ++b) {
      out(2 * b, 2 * b + 2) = 1.0;
      out(2 * b + 1, 2 * b + 3) = 1.0;
    }
  }
  return out;
}

Regime classify(const JordanBlockSpec& block, double epsilon) {
  if (!(epsilon >= 0.0)) fail(ErrorKind::Domain, "epsilon must be nonnegative");
  double gap = block.lambda_r - 0.5;
  if (std::fabs(gap) <= epsilon) return Regime::Critical;
  return gap < 0.0 ? Regime::Subcritical : Regime::Supercritical;
}

void SpectralSpec::validate() const {
  if (k < 2) fail(ErrorKind::Domain, "spectral spec needs at least 2 colors");
  if (combination.rows() != k || combination.cols() != k)
    fail(ErrorKind::Domain, "combination matrix must be K x K");
  if (blocks.empty()) fail(ErrorKind::Domain, "spectral spec needs at least one block");
  int next = 1;
  for (const auto& b : blocks) {
    b.validate();
    if (b.col_begin != next)
      fail(ErrorKind::Domain, "block column ranges must partition columns 1..K-1 in order");
    next = b.col_end();
  }
  if (next != k)
    fail(ErrorKind::Domain, "block column ranges must cover all non-principal columns");
}

Matrix SpectralSpec::jordan() const {
  Matrix j(k, k);
  j(0, 0) = 1.0;
  for (const auto& b : blocks) {
    Matrix lm = b.lambda_matrix();
    for (int r = 0; r < lm.rows(); ++r)
      for (int c = 0; c < lm.cols(); ++c) j(b.col_begin + r, b.col_begin + c) = lm(r, c);
  }
  return j;
}

Matrix SpectralSpec::block_columns(const JordanBlockSpec& block) const {
  return combination.submatrix(0, k, block.col_begin, block.col_end());
}

double UrnModel::w0() const {
  double s = 0.0;
  for (double v : initial_state) s += v;
  return s;
}

int UrnModel::block_index_of_column(int col) const {
  for (std::size_t i = 0; i < spec.blocks.size(); ++i)
    if (col >= spec.blocks[i].col_begin && col < spec.blocks[i].col_end())
      return static_cast<int>(i);
  fail(ErrorKind::Domain, "column index does not belong to any block");
}

const JordanBlockSpec& UrnModel::block_of_column(int col) const {
  return spec.blocks[static_cast<std::size_t>(block_index_of_column(col))];
}

void UrnModel::set_initial_state(Vec w0_state) {
  if (static_cast<int>(w0_state.size()) != colors())
    fail(ErrorKind::Domain, "initial state length must equal the color count");
  double s = 0.0;
  for (double v : w0_state) {
    if (!(v >= 0.0)) fail(ErrorKind::Domain, "initial state entries must be nonnegative");
    s += v;
  }
  if (!(s > 0.0)) fail(ErrorKind::Domain, "initial state must have positive total mass");
  initial_state = std::move(w0_state);
}

std::vector<std::string> stat_labels(const UrnModel& model) {
  std::vector<std::string> labels(static_cast<std::size_t>(model.colors() - 1));
  int counts[3] = {0, 0, 0};
  for (std::size_t bi = 0; bi < model.spec.blocks.size(); ++bi) {
    const auto& b = model.spec.blocks[bi];
    Regime reg = model.regimes[bi];
    int ordinal = ++counts[static_cast<int>(reg)];
    const char* letter = reg == Regime::Subcritical  ? "X"
                         : reg == Regime::Critical   ? "Y"
                                                     : "Z";
    for (int c = 0; c < b.dim(); ++c) {
      std::string name = std::string(letter) + std::to_string(ordinal);
      if (b.dim() > 1) name += "_" + std::to_string(c);
      labels[static_cast<std::size_t>(b.col_begin - 1 + c)] = name;
    }
  }
  return labels;
}

namespace {

UrnModel assemble_model(StochasticMatrix r, SpectralSpec spec, double epsilon_critical) {
  UrnModel model;
  model.replacement = std::move(r);
  model.spec = std::move(spec);
  model.epsilon_critical = epsilon_critical;
  if (!model.replacement.irreducible())
    fail(ErrorKind::NotIrreducible, "replacement matrix is not irreducible");
  model.pi = stationary_distribution(model.replacement);
  for (const auto& b : model.spec.blocks) {
    model.regimes.push_back(classify(b, epsilon_critical));
    double gap = std::fabs(b.lambda_r - 0.5);
    if (gap > 0.0 && gap <= epsilon_critical)
      model.warnings.push_back("lambda_r = " + fmt_double(b.lambda_r) +
                               " lies inside the critical tolerance band; treated as critical");
  }
  model.initial_state.assign(static_cast<std::size_t>(model.colors()), 0.0);
  model.initial_state[0] = 1.0;
  return model;
}

}  // namespace

UrnModel model_from_spectral_spec(const SpectralSpec& spec, double tol,
                                  double epsilon_critical) {
  spec.validate();
  LuDecomposition f = lu_factor(spec.combination);
  if (f.singular) fail(ErrorKind::SingularCombination, "combination matrix is singular");
  Matrix minv = lu_solve_matrix(f, Matrix::identity(spec.k));
  Matrix raw = spec.combination * spec.jordan() * minv;
  for (int i = 0; i < raw.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < raw.cols(); ++j) {
      if (raw(i, j) < -tol)
        fail(ErrorKind::NotStochastic,
             "reconstructed replacement matrix has a negative entry at row " +
                 std::to_string(i) + ", col " + std::to_string(j) + ": " +
                 fmt_double(raw(i, j)));
      sum += raw(i, j);
    }
    if (std::fabs(sum - 1.0) > tol)
      fail(ErrorKind::NotStochastic, "reconstructed replacement row " + std::to_string(i) +
                                         " sums to " + fmt_double(sum));
  }
  StochasticMatrix r = StochasticMatrix::from_matrix(raw, tol);
  double residual = (raw - r.matrix()).max_abs();
  if (residual > 10.0 * tol)
    fail(ErrorKind::NonConvergence, "reconstruction residual above tolerance: " +
                                        fmt_double(residual));
  return assemble_model(std::move(r), spec, epsilon_critical);
}

namespace {

struct EigenItem {
  std::complex<double> lambda;
  Regime regime = Regime::Subcritical;
};

int regime_rank(Regime r) { return static_cast<int>(r); }

}  // namespace

SpectralSpec eigen_decompose(const StochasticMatrix& r, double tol, double epsilon_critical) {
  const int k = r.size();
  if (k > 16) fail(ErrorKind::Domain, "eigendecomposition supports at most 16 colors");
  const Matrix& a = r.matrix();
  std::vector<std::complex<double>> lams = eigenvalues(a, tol);

  // A defective pair splits by about sqrt(machine eps) under QR, so the
  // clustering guard must sit safely above that scale or Jordan structure
  // masquerades as two nearly parallel scalar blocks.
  double defect_scale =
      32.0 * std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, a.inf_norm());
  double cluster_tol = std::max(100.0 * tol, defect_scale);
  for (std::size_t i = 0; i < lams.size(); ++i)
    for (std::size_t j = i + 1; j < lams.size(); ++j)
      if (std::abs(lams[i] - lams[j]) < cluster_tol)
        fail(ErrorKind::DefectiveOrClustered,
             "eigenvalues too close for the numeric route (" + fmt_double(lams[i].real()) +
                 (lams[i].imag() >= 0 ? "+" : "") + fmt_double(lams[i].imag()) + "i vs " +
                 fmt_double(lams[j].real()) + (lams[j].imag() >= 0 ? "+" : "") +
                 fmt_double(lams[j].imag()) + "i); supply an exact spectral spec");

  // Principal eigenvalue: the one nearest 1; snapped exactly.
  std::size_t principal = 0;
  for (std::size_t i = 1; i < lams.size(); ++i)
    if (std::abs(lams[i] - 1.0) < std::abs(lams[principal] - 1.0)) principal = i;
  if (std::abs(lams[principal] - 1.0) > 1e-8)
    fail(ErrorKind::NonConvergence, "principal eigenvalue not found near 1");

  std::vector<EigenItem> items;
  for (std::size_t i = 0; i < lams.size(); ++i) {
    if (i == principal) continue;
    if (lams[i].imag() < 0.0) continue;  // pair handled via its upper member
    EigenItem it;
    it.lambda = lams[i];
    JordanBlockSpec probe;
    probe.kind = lams[i].imag() > 0.0 ? BlockKind::ComplexPair : BlockKind::Real;
    probe.lambda_r = lams[i].real();
    probe.lambda_c = lams[i].imag();
    probe.col_begin = 1;
    it.regime = classify(probe, epsilon_critical);
    items.push_back(it);
  }

  std::stable_sort(items.begin(), items.end(), [](const EigenItem& x, const EigenItem& y) {
    if (regime_rank(x.regime) != regime_rank(y.regime))
      return regime_rank(x.regime) < regime_rank(y.regime);
    if (x.lambda.real() != y.lambda.real()) return x.lambda.real() < y.lambda.real();
    return x.lambda.imag() < y.lambda.imag();
  });

  SpectralSpec spec;
  spec.k = k;
  spec.combination = Matrix(k, k);
  for (int i = 0; i < k; ++i) spec.combination(i, 0) = 1.0;

  int col = 1;
  for (const auto& it : items) {
    JordanBlockSpec b;
    b.lambda_r = it.lambda.real();
    b.lambda_c = it.lambda.imag();
    b.kind = b.lambda_c > 0.0 ? BlockKind::ComplexPair : BlockKind::Real;
    b.d = 1;
    b.col_begin = col;

    std::vector<std::complex<double>> v = eigenvector(a, it.lambda);
    // Polish the pair so downstream identities (R * xi == lambda * xi up to
    // machine precision) hold as tightly as the arithmetic allows.
    std::complex<double> lam = it.lambda;
    eigen_refine(a, lam, v);
    if (std::abs(lam - it.lambda) <= cluster_tol) {
      if (b.kind == BlockKind::Real) {
        b.lambda_r = lam.real();
      } else if (lam.imag() > 0.0) {
        b.lambda_r = lam.real();
        b.lambda_c = lam.imag();
      }
    }
    // Canonical scaling: the entry of largest modulus becomes exactly 1.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    std::complex<double> pivot = v[imax];
    if (std::abs(pivot) == 0.0)
      fail(ErrorKind::NonConvergence, "inverse iteration returned a zero eigenvector");
    for (auto& x : v) x /= pivot;

    if (b.kind == BlockKind::Real) {
      for (int i = 0; i < k; ++i) spec.combination(i, col) = v[static_cast<std::size_t>(i)].real();
    } else {
      for (int i = 0; i < k; ++i) {
        spec.combination(i, col) = v[static_cast<std::size_t>(i)].real();
        spec.combination(i, col + 1) = v[static_cast<std::size_t>(i)].imag();
      }
    }
    col = b.col_end();
    spec.blocks.push_back(b);
  }
  spec.validate();

  LuDecomposition f = lu_factor(spec.combination);
  if (f.singular)
    fail(ErrorKind::NonConvergence, "eigenvector matrix numerically singular");
  Matrix minv = lu_solve_matrix(f, Matrix::identity(k));
  Matrix recon = spec.combination * spec.jordan() * minv;
  double resid = (recon - a).max_abs();
  if (resid > 1e-8)
    fail(ErrorKind::NonConvergence,
         "eigendecomposition reconstruction residual too large: " + fmt_double(resid));
  return spec;
}

UrnModel model_from_matrix(const StochasticMatrix& r, double tol, double epsilon_critical) {
  SpectralSpec spec = eigen_decompose(r, tol, epsilon_critical);
  return assemble_model(r, std::move(spec), epsilon_critical);
}

double normalizer_scalar(Regime regime, const JordanBlockSpec& block, std::int64_t n) {
  if (regime == Regime::Supercritical)
    fail(ErrorKind::Domain, "supercritical normalization is the matrix inverse of A_n");
  if (n < 2) fail(ErrorKind::Domain, "normalization needs n >= 2");
  double nn = static_cast<double>(n);
  if (regime == Regime::Subcritical) return 1.0 / std::sqrt(nn);
  double logn = std::log(nn);
  return 1.0 / std::sqrt(nn * std::pow(logn, 2.0 * block.d - 1.0));
}

AnPair an_product(const JordanBlockSpec& block, std::int64_t n) {
  if (n < 0) fail(ErrorKind::Domain, "A_n product needs n >= 0");
  if (block.kind == BlockKind::Real && block.d == 1) {
    double log_sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j)
      log_sum += std::log1p(block.lambda_r / static_cast<double>(j + 1));
    if (log_sum > 700.0) fail(ErrorKind::Overflow, "A_n overflows double precision");
    AnPair out{Matrix(1, 1), Matrix(1, 1)};
    out.a(0, 0) = std::exp(log_sum);
    out.a_inv(0, 0) = std::exp(-log_sum);
    return out;
  }
  AnAccumulator acc(block);
  acc.advance_to(n);
  AnPair out{acc.value(), acc.inverse()};
  return out;
}

AnAccumulator::AnAccumulator(const JordanBlockSpec& block)
    : block_(block), factor_base_(block.lambda_matrix()), a_(Matrix::identity(block.dim())) {}

void AnAccumulator::step() {
  const int m = a_.cols();
  Matrix factor = Matrix::identity(m);
  double inv_t = 1.0 / static_cast<double>(n_ + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) factor(i, j) += factor_base_(i, j) * inv_t;
  a_ = a_ * factor;
  ++n_;
  if (a_.max_abs() > kOverflowGuard)
    fail(ErrorKind::Overflow, "A_n product exceeds the overflow guard; horizon too large");
}

void AnAccumulator::advance_to(std::int64_t n) {
  if (n < n_) fail(ErrorKind::Domain, "A_n accumulator cannot step backwards");
  while (n_ < n) step();
}

Matrix AnAccumulator::inverse() const { return urnclt::inverse(a_); }

}  // namespace urnclt
