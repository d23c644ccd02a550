#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnclt/linalg.hpp"

namespace urnclt {

inline constexpr double kDefaultCriticalBand = 1e-9;

enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime r);

enum class BlockKind { Real, ComplexPair };

const char* block_kind_name(BlockKind k);

// One real Jordan block (lambda_r I + F) or one rotation block
// (lambda_r I + lambda_c C + F) of chain length d. Real blocks span d
// columns of the combination matrix, rotation blocks span 2d.
struct JordanBlockSpec {
  BlockKind kind = BlockKind::Real;
  double lambda_r = 0.0;
  double lambda_c = 0.0;  // 0 for Real, > 0 for ComplexPair
  int d = 1;
  int col_begin = 0;  // first column in the combination matrix

  int dim() const { return kind == BlockKind::Real ? d : 2 * d; }
  int col_end() const { return col_begin + dim(); }
  void validate() const;

  // lambda_r I + lambda_c C + F in the real representation.
  Matrix lambda_matrix() const;
  // The nilpotent part F alone (unit superdiagonal, blockwise for pairs).
  Matrix nilpotent() const;
};

Regime classify(const JordanBlockSpec& block, double epsilon = kDefaultCriticalBand);

// Combination matrix plus block descriptors. Column 0 is the principal
// all-ones column; blocks partition columns 1..K-1 contiguously.
struct SpectralSpec {
  int k = 0;
  Matrix combination{1, 1};
  std::vector<JordanBlockSpec> blocks;

  void validate() const;
  // blockdiag(1, Lambda_1, Lambda_2, ...) aligned with the columns.
  Matrix jordan() const;
  // Columns col_begin..col_end of the combination matrix for one block.
  Matrix block_columns(const JordanBlockSpec& block) const;
};

// A fully assembled model: replacement matrix, spectral structure,
// stationary distribution, per-block regimes and the initial composition.
struct UrnModel {
  StochasticMatrix replacement;
  SpectralSpec spec;
  ProbabilityVector pi{Vec{1.0}};
  std::vector<Regime> regimes;
  double epsilon_critical = kDefaultCriticalBand;
  Vec initial_state;  // nonnegative, positive total mass
  std::vector<std::string> warnings;

  int colors() const { return replacement.size(); }
  double w0() const;
  int block_index_of_column(int col) const;  // col in 1..K-1
  const JordanBlockSpec& block_of_column(int col) const;
  void set_initial_state(Vec w0_state);
};

// Human-readable names for the K-1 tracked statistics, aligned with
// combination columns 1..K-1 (X = subcritical, Y = critical, Z = super).
std::vector<std::string> stat_labels(const UrnModel& model);

// Builds R = M * blockdiag(1, J...) * M^-1 and validates it.
UrnModel model_from_spectral_spec(const SpectralSpec& spec, double tol = 1e-10,
                                  double epsilon_critical = kDefaultCriticalBand);

// Numeric route for diagonalizable R: QR eigensolve, conjugate-pair
// detection, canonical block ordering (sub, critical grouped by d, super).
SpectralSpec eigen_decompose(const StochasticMatrix& r, double tol = 1e-10,
                             double epsilon_critical = kDefaultCriticalBand);

UrnModel model_from_matrix(const StochasticMatrix& r, double tol = 1e-10,
                           double epsilon_critical = kDefaultCriticalBand);

// Scalar normalization multiplier: 1/sqrt(n) (subcritical) or
// 1/sqrt(n log^{2d-1} n) (critical). Supercritical blocks use an_product.
double normalizer_scalar(Regime regime, const JordanBlockSpec& block, std::int64_t n);

struct AnPair {
  Matrix a;
  Matrix a_inv;
};

// A_n = prod_{j=0}^{n-1} (I + Lambda/(j+1)) and its inverse. Scalar real
// blocks accumulate in log space; matrix blocks multiply incrementally
// with an overflow monitor.
AnPair an_product(const JordanBlockSpec& block, std::int64_t n);

// Incremental accumulator for A_n, stepped alongside a simulation.
class AnAccumulator {
 public:
  explicit AnAccumulator(const JordanBlockSpec& block);
  void step();
  void advance_to(std::int64_t n);
  std::int64_t n() const { return n_; }
  const Matrix& value() const { return a_; }
  Matrix inverse() const;

 private:
  JordanBlockSpec block_;
  Matrix factor_base_;  // Lambda, reused each step
  Matrix a_;
  std::int64_t n_ = 0;
};

}  // namespace urnclt
