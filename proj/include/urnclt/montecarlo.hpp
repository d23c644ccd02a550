#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnclt/limits.hpp"
#include "urnclt/spectrum.hpp"
#include "urnclt/urn.hpp"

namespace urnclt {

struct EnsembleConfig {
  std::int64_t paths = 10'000;
  std::int64_t horizon = 100'000;
  std::vector<std::int64_t> checkpoints{1'000, 10'000, 100'000};
  std::uint64_t base_seed = 42;
  int workers = 0;  // 0 = machine parallelism

  void validate() const;
};

// Ensemble samples: one matrix per evaluation point (the checkpoints plus
// the horizon), each paths x (K-1), row i generated from stream
// (base_seed, i). Output is independent of the worker count.
struct EnsembleResult {
  std::vector<std::int64_t> eval_points;
  std::vector<Matrix> samples;
  Matrix final_states{0, 0};  // paths x K at the horizon
  std::int64_t paths = 0;

  Vec column_at(std::size_t eval_index, int stat_index) const;
};

EnsembleResult run_ensemble(const UrnModel& model, const EnsembleConfig& config);

double normal_cdf(double x, double variance);

// One-sample Kolmogorov-Smirnov against N(0, variance); pass at the
// asymptotic alpha = 0.01 critical value 1.628/sqrt(M).
struct KsResult {
  double d = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::int64_t m = 0;
};

KsResult ks_gaussian(Vec samples, double variance);

// Pearson correlations between every pair of statistics living in
// different regimes, at the last evaluation point.
struct CorrelationEntry {
  int stat_a = 0;
  int stat_b = 0;
  double rho = 0.0;
};

struct CorrelationResult {
  double max_abs_rho = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::vector<CorrelationEntry> entries;
};

CorrelationResult cross_regime_independence(const UrnModel& model,
                                            const EnsembleResult& ens);

// Per-checkpoint maxima and medians of |Z_{n_k} - Z_horizon| for one
// supercritical statistic; pass iff the median shrinks from the first to
// the last intermediate checkpoint by at least 2 per decade spanned.
struct MartingaleGapResult {
  std::vector<std::int64_t> ns;
  Vec max_gap;
  Vec median_gap;
  double required_ratio = 2.0;
  bool pass = false;
};

MartingaleGapResult martingale_convergence_check(const EnsembleResult& ens,
                                                 int stat_index);

struct StrongLawResult {
  double fraction = 0.0;
  double delta = 0.05;
  double min_fraction = 0.99;
  bool pass = false;
};

StrongLawResult strong_law_check(const UrnModel& model, const EnsembleResult& ens,
                                 double delta = 0.05);

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

// Empirical and exact moments of every statistic at one evaluation point.
// exact_var entries are NaN for columns outside scalar real blocks.
struct StatTable {
  std::int64_t n = 0;
  Vec emp_mean;
  Vec emp_var;
  Vec exact_mean;
  Vec exact_var;
};

struct VerifyOptions {
  double tamper_variance_factor = 1.0;  // debug: scales theoretical variances
  double strong_law_delta = 0.05;
  int oracle_states = 1000;
  std::uint64_t oracle_seed = 7;
  std::int64_t cross_horizon = 1'000'000;
};

struct VerificationReport {
  std::string model_hash;
  std::uint64_t base_seed = 0;
  std::int64_t paths = 0;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> eval_points;
  std::vector<std::string> labels;
  std::vector<StatTable> tables;
  LimitCovariance limits;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  double tamper_variance_factor = 1.0;
  bool pass = true;
};

VerificationReport verify(const UrnModel& model, const EnsembleConfig& config,
                          const VerifyOptions& options);

// Random but reproducible urn states for oracle spot checks: composition
// uniform on the simplex scale, step index log-uniform in [2, 2048].
std::vector<UrnState> random_states(const UrnModel& model, int count,
                                    std::uint64_t seed);

}  // namespace urnclt
