#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "urnclt/rng.hpp"
#include "urnclt/spectrum.hpp"

namespace urnclt {

inline constexpr std::int64_t kMassSnapInterval = 1 << 20;
inline constexpr std::int64_t kMaxHorizon = 100'000'000;
inline constexpr std::int64_t kMaxRecursionHorizon = 10'000'000;

// Ball weights per color at step n. The compensation vector carries the
// running floating-point correction for the weight additions so the total
// mass stays within 1e-9 of n + w0 over long runs.
struct UrnState {
  Vec w;
  Vec comp;
  std::int64_t n = 0;
  double w0 = 1.0;

  double total() const { return static_cast<double>(n) + w0; }
};

UrnState initial_urn_state(const UrnModel& model);

// One draw: color = smallest index whose cumulative weight exceeds
// u * (n + w0); the matching replacement row is added. Returns the color.
int step(UrnState& state, const StochasticMatrix& r, double u);

// Rescales the weights so they sum to exactly n + w0 again.
void snap_mass(UrnState& state);

struct Trajectory {
  std::vector<std::int64_t> checkpoints;
  std::vector<Vec> states;
  std::int64_t horizon = 0;
  double w0 = 1.0;
  std::uint64_t seed = 0;

  const Vec& state_at(std::int64_t n) const;  // MissingCheckpoint if absent
};

Trajectory simulate_stream(const UrnModel& model, std::int64_t horizon,
                           std::vector<std::int64_t> checkpoints, RngStream rng);
Trajectory simulate(const UrnModel& model, std::int64_t horizon,
                    std::vector<std::int64_t> checkpoints, std::uint64_t seed);

// Per-block scaling for the normalized statistics at a fixed n: a scalar
// multiplier for sub/critical blocks, the matrix A_n^{-1} for supercritical
// blocks. Precomputed once per checkpoint, shared across paths.
struct BlockNormalizers {
  std::int64_t n = 0;
  std::vector<double> scalar;  // per block; 0 for supercritical blocks
  std::vector<Matrix> a_inv;   // per block; empty for sub/critical blocks
};

BlockNormalizers normalizers_at(const UrnModel& model, std::int64_t n);

// The K-1 tracked statistics, aligned with combination columns 1..K-1.
Vec normalized_statistics(const UrnModel& model, const Vec& w,
                          const BlockNormalizers& norms);
Vec normalized_statistics(const UrnModel& model, const Trajectory& traj, std::int64_t n);

// One-step conditional mean/covariance of a pair of normalized statistics,
// computed two independent ways: a closed form that consumes the Jordan
// blocks (S Lambda), and a brute-force enumeration of all K colors that
// consumes the replacement rows (R S). Their agreement is the oracle
// contract for the martingale-difference algebra.
struct ConditionalMoments {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double cov_ab = 0.0;
};

struct ConditionalMomentPair {
  ConditionalMoments closed_form;
  ConditionalMoments enumeration;
  double max_rel_gap = 0.0;
};

ConditionalMomentPair one_step_conditional_moments(const UrnModel& model,
                                                   const UrnState& state, int col_a,
                                                   int col_b);

// Deterministic recursion for E W_n together with the raw second moments
// E[(W'xi_i)(W'xi_j)] of eigenvector combinations:
//   E W_{n+1}      = E W_n + R' E W_n / t,
//   E[m_{ij}]_{n+1} = (1 + (li+lj)/t) m_ij + li lj <E W_n / t, xi_i xi_j>,
// with t = n + w0. Valid only for columns of scalar real blocks (d = 1),
// where W'xi evolves autonomously. O(n K) time to a horizon.
class MomentRecursion {
 public:
  MomentRecursion(const UrnModel& model, std::vector<std::pair<int, int>> pairs);

  void step();
  void advance_to(std::int64_t n);

  std::int64_t n() const { return n_; }
  double t() const { return static_cast<double>(n_) + w0_; }
  const Vec& mean_state() const { return ew_; }
  // <E W_n, column>: exact mean of the raw combination, any column 1..K-1.
  double mean_combination(int col) const;
  std::size_t pair_count() const { return pairs_.size(); }
  const std::pair<int, int>& pair(std::size_t i) const { return pairs_[i]; }
  double second_moment(std::size_t pair_index) const { return m_[pair_index]; }
  // Raw covariance E[(W'xi_i)(W'xi_j)] - E[W'xi_i] E[W'xi_j].
  double central_second_moment(std::size_t pair_index) const;

 private:
  const UrnModel* model_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<double> lambda_sum_;   // li + lj per pair
  std::vector<double> lambda_prod_;  // li * lj per pair
  std::vector<Vec> xi_prod_;         // elementwise xi_i * xi_j per pair
  Vec ew_;
  Vec scratch_;
  std::vector<double> m_;
  std::int64_t n_ = 0;
  double w0_ = 1.0;
};

// Column label lookup shared by reports: lambda of a d=1 real column.
double column_lambda(const UrnModel& model, int col);

}  // namespace urnclt
