#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "urnclt/spectrum.hpp"
#include "urnclt/urn.hpp"

namespace urnclt {

// Limiting covariance of all subcritical columns jointly: the solution of
// A' S + S A = Q with A = I/2 - G and Q = G' M' D_pi M G, where G stacks the
// subcritical blocks and M their combination columns.
Matrix limit_cov_subcritical(const UrnModel& model);

// Critical-regime limit covariance. `matrix` carries the regime-consistent
// coefficients (real blocks 1/((2d-1)((d-1)!)^2), complex pairs half that,
// mixed pairs without the half); `uniform_half_variant` applies the global
// 1/2 to every pair instead. Cross-kind block pairs (one real, one complex)
// follow the same pattern but have no section-level anchor; they are listed
// so reports can flag them.
struct CriticalCovariance {
  Matrix matrix{0, 0};
  Matrix uniform_half_variant{0, 0};
  std::vector<std::pair<int, int>> cross_kind_pairs;  // col_begin pairs
};

CriticalCovariance limit_cov_critical(const UrnModel& model);

double critical_coefficient(int d, BlockKind kind);
double critical_mixed_coefficient(const JordanBlockSpec& a, const JordanBlockSpec& b);

// Direct truncated summation of the critical product-sum
//   sum_{j=n0}^{n-1} u_j^{2(d-1)} w(u_j) / ((j+1) ((d-1)!)^2),
// u_j = log n - log(j+1), normalized by (log n - log n0)^{2d-1}; w = 1 for
// real blocks and cos^2(lambda_c u) for complex pairs. Converges to
// critical_coefficient(d, kind); used as the independent oracle for it.
double critical_coefficient_sum(int d, BlockKind kind, double lambda_c, std::int64_t n,
                                std::int64_t n0);

// Limit of E[(W'xi_i)(W'xi_j)] / (A_{i,n} A_{j,n}) for two scalar real
// supercritical columns, evaluated at a finite horizon with a certified
// tail bound (increments decay like n^{-(li+lj)} with li+lj > 1).
struct CrossLimit {
  double value = 0.0;
  double tail_bound = 0.0;
  double last_increment = 0.0;
  std::int64_t horizon = 0;
};

CrossLimit supercritical_cross_limit(const UrnModel& model, int col_i, int col_j,
                                     std::int64_t horizon);

// Exact E Z_n^2 sequence of the normalized supercritical martingale at
// n = 0, stride, 2*stride, ..., horizon (horizon always included).
std::vector<std::pair<std::int64_t, double>> l2_bound_curve(const UrnModel& model,
                                                            int col,
                                                            std::int64_t horizon,
                                                            std::int64_t stride);

// Per-regime bundle used by reports: column ids per regime, the matrices
// above, and the supercritical cross-limit table (NaN where a column sits
// in a d >= 2 or complex block, which the exact recursion cannot reach).
struct LimitCovariance {
  std::vector<int> sub_cols, crit_cols, super_cols;
  Matrix subcritical{0, 0};
  CriticalCovariance critical;
  Matrix supercritical{0, 0};
  Matrix supercritical_tail{0, 0};
  std::int64_t cross_horizon = 0;
};

LimitCovariance limit_covariance(const UrnModel& model,
                                 std::int64_t cross_horizon = 1'000'000);

}  // namespace urnclt
