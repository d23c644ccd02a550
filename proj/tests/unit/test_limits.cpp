#include <doctest.h>

#include <cmath>
#include <vector>

#include "unit/fixtures.hpp"
#include "urnclt/limits.hpp"

using namespace urnclt;
using namespace urnclt::testfix;

namespace {

Matrix mat_exp(const Matrix& m) {
  int s = 0;
  double norm = m.inf_norm();
  while (norm > 0.5) {
    norm *= 0.5;
    ++s;
  }
  Matrix x = m;
  x *= std::pow(0.5, s);
  Matrix term = Matrix::identity(m.rows());
  Matrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * x;
    term *= 1.0 / k;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Matrix simpson_lyapunov(const Matrix& a, const Matrix& q, double t_max, int intervals) {
  Matrix acc(a.rows(), a.cols());
  const double h = t_max / intervals;
  for (int i = 0; i <= intervals; ++i) {
    double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    Matrix at = a;
    at *= -(i * h);
    Matrix e = mat_exp(at);
    Matrix f = e.transpose() * q * e;
    f *= w * h / 3.0;
    acc += f;
  }
  return acc;
}

// Gamma-function limit of the normalized cross second moment for two scalar
// supercritical eigenvalues (the closed form of the affine recursion).
double closed_cross(double li, double lj, double pi_xx) {
  return li * lj * pi_xx / (li + lj - 1.0) *
         std::exp(std::lgamma(1.0 + li) + std::lgamma(1.0 + lj) -
                  std::lgamma(1.0 + li + lj));
}

// Real critical block plus a complex critical pair on an orthogonal basis.
UrnModel mixed_critical_model() {
  SpectralSpec s;
  s.k = 4;
  s.combination = Matrix::from_rows(
      {{1.0, 1.0, 1.0, 0.0},
       {1.0, -1.0, 0.0, 1.0},
       {1.0, 1.0, -1.0, 0.0},
       {1.0, -1.0, 0.0, -1.0}});
  JordanBlockSpec br;
  br.lambda_r = 0.5;
  br.col_begin = 1;
  JordanBlockSpec bp;
  bp.kind = BlockKind::ComplexPair;
  bp.lambda_r = 0.5;
  bp.lambda_c = 0.25;
  bp.col_begin = 2;
  s.blocks.push_back(br);
  s.blocks.push_back(bp);
  return model_from_spectral_spec(s);
}

}  // namespace

TEST_CASE("subcritical limit variance: frozen scalar values") {
  // Balanced two-color urn, diag 0.6: Q = (1/5)^2, A = 3/10, sigma^2 = 1/15.
  auto sub = two_color_model(0.6);
  Matrix s1 = limit_cov_subcritical(sub);
  REQUIRE(s1.rows() == 1);
  CHECK(s1(0, 0) == doctest::Approx(1.0 / 15.0).epsilon(1e-13));

  // Four-color model: <pi, xi^2> = 1/2 halves the drive term.
  Matrix s2 = limit_cov_subcritical(haar_model());
  REQUIRE(s2.rows() == 1);
  CHECK(s2(0, 0) == doctest::Approx(1.0 / 30.0).epsilon(1e-13));

  CHECK_THROWS_AS(limit_cov_subcritical(two_color_model(0.875)), Error);
}

TEST_CASE("subcritical limit covariance vs quadrature") {
  // Decoupled three-block model: diagonal A and Q give sigma_ii = Q_ii/(2 A_ii).
  auto diagonal = haar_model(0.2, 0.3, 0.4);
  Matrix s = limit_cov_subcritical(diagonal);
  REQUIRE(s.rows() == 3);
  CHECK(s(0, 0) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK(s(1, 1) == doctest::Approx(0.1125).epsilon(1e-12));
  CHECK(s(2, 2) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::fabs(s(0, 1)) < 1e-13);
  CHECK(std::fabs(s(1, 2)) < 1e-13);

  // Rotation pair: compare against the integral form computed by Simpson.
  auto rot = rotation_model();
  Matrix sr = limit_cov_subcritical(rot);
  REQUIRE(sr.rows() == 2);

  const auto& b = rot.spec.blocks[0];
  Matrix m2 = rot.spec.block_columns(b);
  Matrix dpi(3, 3);
  for (int i = 0; i < 3; ++i) dpi(i, i) = rot.pi[i];
  Matrix lam = b.lambda_matrix();
  Matrix q = lam.transpose() * m2.transpose() * dpi * m2 * lam;
  Matrix a = Matrix::identity(2);
  a *= 0.5;
  a -= lam;
  Matrix ref = simpson_lyapunov(a, q, 40.0, 8192);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(sr(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-7));
}

TEST_CASE("critical coefficients") {
  CHECK(critical_coefficient(1, BlockKind::Real) == doctest::Approx(1.0));
  CHECK(critical_coefficient(2, BlockKind::Real) == doctest::Approx(1.0 / 3.0));
  CHECK(critical_coefficient(3, BlockKind::Real) == doctest::Approx(1.0 / 20.0));
  CHECK(critical_coefficient(1, BlockKind::ComplexPair) == doctest::Approx(0.5));
  CHECK(critical_coefficient(2, BlockKind::ComplexPair) == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(critical_coefficient(0, BlockKind::Real), Error);

  JordanBlockSpec r1;
  r1.lambda_r = 0.5;
  r1.col_begin = 1;
  JordanBlockSpec r2 = r1;
  r2.d = 2;
  JordanBlockSpec p1;
  p1.kind = BlockKind::ComplexPair;
  p1.lambda_r = 0.5;
  p1.lambda_c = 0.25;
  p1.col_begin = 1;

  CHECK(critical_mixed_coefficient(r1, r1) == doctest::Approx(1.0));
  CHECK(critical_mixed_coefficient(r1, r2) == doctest::Approx(0.5));
  CHECK(critical_mixed_coefficient(r1, p1) == doctest::Approx(1.0));  // no half
  CHECK(critical_mixed_coefficient(p1, p1) == doctest::Approx(0.5));
}

TEST_CASE("critical coefficient sums converge to the formula values") {
  const std::int64_t n0 = 100;
  const std::vector<std::int64_t> grid{10'000, 100'000, 1'000'000};

  for (int d = 1; d <= 3; ++d) {
    double c = critical_coefficient(d, BlockKind::Real);
    double prev = 1e300;
    for (std::int64_t n : grid) {
      double s = critical_coefficient_sum(d, BlockKind::Real, 0.0, n, n0);
      double err = std::fabs(s - c);
      CHECK(err <= prev);
      prev = err;
    }
    double final_err =
        std::fabs(critical_coefficient_sum(d, BlockKind::Real, 0.0, grid.back(), n0) - c);
    CHECK(final_err < 0.05 * c);
  }

  // Complex pair: the cos^2 weight averages to 1/2; the truncation phase
  // at lambda_c = 0.85 keeps the oscillatory remainder small on this grid.
  double prev = 1e300;
  for (std::int64_t n : grid) {
    double s = critical_coefficient_sum(1, BlockKind::ComplexPair, 0.85, n, n0);
    double err = std::fabs(s - 0.5);
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 0.05 * 0.5);

  CHECK_THROWS_AS(critical_coefficient_sum(1, BlockKind::ComplexPair, 0.0, 1000, 100), Error);
  CHECK_THROWS_AS(critical_coefficient_sum(1, BlockKind::Real, 0.0, 100, 100), Error);
}

TEST_CASE("critical limit covariance: frozen values") {
  // Balanced two-color urn at the critical diagonal: sigma^2 = 1/4.
  auto crit = two_color_model(0.75);
  auto v1 = limit_cov_critical(crit);
  REQUIRE(v1.matrix.rows() == 1);
  CHECK(v1.matrix(0, 0) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(v1.uniform_half_variant(0, 0) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(v1.cross_kind_pairs.empty());

  // Four-color model: <pi, xi^2> = 1/2.
  auto v2 = limit_cov_critical(haar_model());
  CHECK(v2.matrix(0, 0) == doctest::Approx(0.125).epsilon(1e-13));

  // Critical rotation: V2 = (lambda_r^2 + lambda_c^2)/2 * <pi, re^2> * I with
  // the complex half, = I/12 for the circulant chain.
  auto v3 = limit_cov_critical(rotation_critical_model());
  REQUIRE(v3.matrix.rows() == 2);
  CHECK(v3.matrix(0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(v3.matrix(1, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
  CHECK(std::fabs(v3.matrix(0, 1)) < 1e-12);
  CHECK(v3.uniform_half_variant(0, 0) == doctest::Approx(1.0 / 12.0).epsilon(1e-10));

  CHECK_THROWS_AS(limit_cov_critical(two_color_model(0.6)), Error);
}

TEST_CASE("critical cross-kind pairs are computed and flagged") {
  auto model = mixed_critical_model();
  auto v = limit_cov_critical(model);
  REQUIRE(v.matrix.rows() == 3);

  CHECK(v.matrix(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(v.matrix(1, 1) == doctest::Approx(0.078125).epsilon(1e-12));
  CHECK(v.matrix(2, 2) == doctest::Approx(0.078125).epsilon(1e-12));
  // Orthogonal eigencolumns: the flagged cross entries vanish here.
  CHECK(std::fabs(v.matrix(0, 1)) < 1e-12);
  CHECK(std::fabs(v.matrix(0, 2)) < 1e-12);

  REQUIRE(v.cross_kind_pairs.size() == 1);
  CHECK(v.cross_kind_pairs[0].first == 1);
  CHECK(v.cross_kind_pairs[0].second == 2);

  CHECK(v.uniform_half_variant(0, 0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(v.uniform_half_variant(1, 1) == doctest::Approx(0.078125).epsilon(1e-12));

  // Symmetry and (same-kind blocks aside) positive semidefiniteness of the
  // diagonal blocks.
  for (int i = 0; i < 3; ++i) {
    CHECK(v.matrix(i, i) > 0.0);
    for (int j = 0; j < 3; ++j) CHECK(v.matrix(i, j) == doctest::Approx(v.matrix(j, i)));
  }
}

TEST_CASE("supercritical cross limits match the gamma closed form") {
  auto ts = two_super_model();

  auto c12 = supercritical_cross_limit(ts, 1, 2, 1'000'000);
  double ref12 = closed_cross(0.75, 0.8, 1.0 / 3.0);
  CHECK(std::fabs(c12.value - ref12) <= c12.tail_bound);
  CHECK(c12.tail_bound < 2e-3);
  CHECK(c12.value > 0.0);
  CHECK(c12.horizon == 1'000'000);

  // The certificate really bounds the remaining tail: doubling the horizon
  // moves the value by less than the bound at the shorter horizon.
  auto c12_short = supercritical_cross_limit(ts, 1, 2, 250'000);
  auto c12_long = supercritical_cross_limit(ts, 1, 2, 500'000);
  CHECK(std::fabs(c12_long.value - c12_short.value) <= c12_short.tail_bound);
  CHECK(std::fabs(c12_short.value - ref12) <= c12_short.tail_bound);

  // Symmetric in the column pair.
  auto c21 = supercritical_cross_limit(ts, 2, 1, 100'000);
  auto c12s = supercritical_cross_limit(ts, 1, 2, 100'000);
  CHECK(c21.value == c12s.value);

  auto d1 = supercritical_cross_limit(ts, 1, 1, 1'000'000);
  CHECK(std::fabs(d1.value - closed_cross(0.75, 0.75, 2.0 / 3.0)) <= d1.tail_bound);

  // Subcritical columns are rejected.
  CHECK_THROWS_AS(supercritical_cross_limit(two_color_model(0.6), 1, 1, 1000), Error);
}

TEST_CASE("l2 bound curve is a nondecreasing approach to the limit") {
  auto model = two_color_model(0.875);  // lambda = 3/4
  auto curve = l2_bound_curve(model, 1, 100'000, 10'000);
  REQUIRE(curve.size() >= 3);
  CHECK(curve.front().first == 0);
  CHECK(curve.front().second == doctest::Approx(0.0));
  CHECK(curve.back().first == 100'000);
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].second >= curve[i - 1].second - 1e-12);

  double limit = closed_cross(0.75, 0.75, 1.0);
  CHECK(curve.back().second < limit);
  CHECK(curve.back().second > limit - 0.01);
}

TEST_CASE("limit covariance bundle") {
  auto lim = limit_covariance(haar_model(), 1'000'000);
  CHECK(lim.sub_cols == std::vector<int>{1});
  CHECK(lim.crit_cols == std::vector<int>{2});
  CHECK(lim.super_cols == std::vector<int>{3});
  CHECK(lim.subcritical(0, 0) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK(lim.critical.matrix(0, 0) == doctest::Approx(0.125).epsilon(1e-12));
  double ref = closed_cross(0.775, 0.775, 1.0);
  CHECK(std::fabs(lim.supercritical(0, 0) - ref) <= lim.supercritical_tail(0, 0));
  CHECK(lim.cross_horizon == 1'000'000);

  // Chain blocks are flagged as unreachable for the exact recursion.
  auto lim2 = limit_covariance(super_d2_model(), 10'000);
  REQUIRE(lim2.super_cols.size() == 2);
  CHECK(std::isnan(lim2.supercritical(0, 0)));
  CHECK(lim2.subcritical.rows() == 0);
}
