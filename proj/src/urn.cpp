#include "urnclt/urn.hpp"

#include <algorithm>
#include <cmath>

namespace urnclt {

UrnState initial_urn_state(const UrnModel& model) {
  UrnState st;
  st.w = model.initial_state;
  st.comp.assign(st.w.size(), 0.0);
  st.n = 0;
  st.w0 = model.w0();
  return st;
}

int step(UrnState& state, const StochasticMatrix& r, double u) {
  const Matrix& m = r.matrix();
  const int k = m.rows();
  const double target = u * state.total();
  double cum = 0.0;
  int color = -1;
  int last_positive = 0;
  for (int i = 0; i < k; ++i) {
    double wi = state.w[i];
    if (wi > 0.0) last_positive = i;
    cum += wi;
    if (cum > target) {
      color = i;
      break;
    }
  }
  if (color < 0) color = last_positive;
  const double* row = m.row_ptr(color);
  for (int j = 0; j < k; ++j) {
    double y = row[j] - state.comp[j];
    double t = state.w[j] + y;
    state.comp[j] = (t - state.w[j]) - y;
    state.w[j] = t;
  }
  ++state.n;
  return color;
}

void snap_mass(UrnState& state) {
  double sum = 0.0;
  for (double& v : state.w) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum > 0.0) {
    double scale = state.total() / sum;
    for (double& v : state.w) v *= scale;
  }
  std::fill(state.comp.begin(), state.comp.end(), 0.0);
}

const Vec& Trajectory::state_at(std::int64_t n) const {
  auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), n);
  if (it == checkpoints.end() || *it != n)
    fail(ErrorKind::MissingCheckpoint,
         "step " + std::to_string(n) + " was not recorded as a checkpoint");
  return states[static_cast<std::size_t>(it - checkpoints.begin())];
}

Trajectory simulate_stream(const UrnModel& model, std::int64_t horizon,
                           std::vector<std::int64_t> checkpoints, RngStream rng) {
  if (horizon < 0 || horizon > kMaxHorizon)
    fail(ErrorKind::Domain, "horizon must lie in [0, 1e8]");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > horizon)
      fail(ErrorKind::Domain, "checkpoints must lie in [0, horizon]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      fail(ErrorKind::Domain, "checkpoints must be strictly increasing");
  }

  Trajectory traj;
  traj.checkpoints = std::move(checkpoints);
  traj.horizon = horizon;
  traj.states.reserve(traj.checkpoints.size());

  UrnState st = initial_urn_state(model);
  traj.w0 = st.w0;
  std::size_t ci = 0;
  for (;;) {
    if (ci < traj.checkpoints.size() && st.n == traj.checkpoints[ci]) {
      traj.states.push_back(st.w);
      ++ci;
    }
    if (st.n == horizon) break;
    step(st, model.replacement, rng.next_double());
    if (st.n % kMassSnapInterval == 0) snap_mass(st);
  }
  return traj;
}

Trajectory simulate(const UrnModel& model, std::int64_t horizon,
                    std::vector<std::int64_t> checkpoints, std::uint64_t seed) {
  Trajectory traj =
      simulate_stream(model, horizon, std::move(checkpoints), RngStream::for_path(seed, 0));
  traj.seed = seed;
  return traj;
}

BlockNormalizers normalizers_at(const UrnModel& model, std::int64_t n) {
  BlockNormalizers out;
  out.n = n;
  out.scalar.resize(model.spec.blocks.size(), 0.0);
  out.a_inv.resize(model.spec.blocks.size());
  for (std::size_t bi = 0; bi < model.spec.blocks.size(); ++bi) {
    const auto& b = model.spec.blocks[bi];
    if (model.regimes[bi] == Regime::Supercritical)
      out.a_inv[bi] = an_product(b, n).a_inv;
    else
      out.scalar[bi] = normalizer_scalar(model.regimes[bi], b, n);
  }
  return out;
}

Vec normalized_statistics(const UrnModel& model, const Vec& w,
                          const BlockNormalizers& norms) {
  const int k = model.colors();
  Vec stats(static_cast<std::size_t>(k - 1), 0.0);
  for (std::size_t bi = 0; bi < model.spec.blocks.size(); ++bi) {
    const auto& b = model.spec.blocks[bi];
    const int dim = b.dim();
    Vec raw(static_cast<std::size_t>(dim), 0.0);
    for (int m = 0; m < dim; ++m) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += w[static_cast<std::size_t>(i)] *
                                         model.spec.combination(i, b.col_begin + m);
      raw[static_cast<std::size_t>(m)] = acc;
    }
    if (model.regimes[bi] == Regime::Supercritical) {
      const Matrix& ai = norms.a_inv[bi];
      for (int c = 0; c < dim; ++c) {
        double acc = 0.0;
        for (int m = 0; m < dim; ++m) acc += raw[static_cast<std::size_t>(m)] * ai(m, c);
        stats[static_cast<std::size_t>(b.col_begin - 1 + c)] = acc;
      }
    } else {
      for (int c = 0; c < dim; ++c)
        stats[static_cast<std::size_t>(b.col_begin - 1 + c)] =
            raw[static_cast<std::size_t>(c)] * norms.scalar[bi];
    }
  }
  return stats;
}

Vec normalized_statistics(const UrnModel& model, const Trajectory& traj, std::int64_t n) {
  return normalized_statistics(model, traj.state_at(n), normalizers_at(model, n));
}

namespace {

// Everything needed to evaluate one normalized statistic after one more
// draw: stat_next(color c) = base + g[c], where base uses the step-(n+1)
// normalizer. The two g vectors differ only in what they consume: the
// closed form multiplies S by its Jordan block, the enumeration multiplies
// the replacement rows by the raw combination vector.
struct ColumnCtx {
  double base = 0.0;
  Vec g_closed;
  Vec g_enum;
  double scale_g = 0.0;  // <p, |g_closed|>, magnitude yardstick
};

ColumnCtx column_ctx(const UrnModel& model, const UrnState& state, int col) {
  const int k = model.colors();
  int bi = model.block_index_of_column(col);
  const JordanBlockSpec& b = model.spec.blocks[static_cast<std::size_t>(bi)];
  const Regime reg = model.regimes[static_cast<std::size_t>(bi)];
  const int dim = b.dim();
  const int jl = col - b.col_begin;

  Matrix s = model.spec.block_columns(b);
  Vec ncol(static_cast<std::size_t>(dim), 0.0);
  if (reg == Regime::Supercritical) {
    Matrix a1inv = an_product(b, state.n + 1).a_inv;
    for (int m = 0; m < dim; ++m) ncol[static_cast<std::size_t>(m)] = a1inv(m, jl);
  } else {
    ncol[static_cast<std::size_t>(jl)] = normalizer_scalar(reg, b, state.n + 1);
  }

  Vec u(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    double acc = 0.0;
    for (int m = 0; m < dim; ++m) acc += s(i, m) * ncol[static_cast<std::size_t>(m)];
    u[static_cast<std::size_t>(i)] = acc;
  }

  ColumnCtx ctx;
  ctx.base = dot(state.w, u);

  Matrix sl = s * b.lambda_matrix();
  ctx.g_closed.assign(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) {
    double acc = 0.0;
    for (int m = 0; m < dim; ++m) acc += sl(i, m) * ncol[static_cast<std::size_t>(m)];
    ctx.g_closed[static_cast<std::size_t>(i)] = acc;
  }

  const Matrix& r = model.replacement.matrix();
  ctx.g_enum.assign(static_cast<std::size_t>(k), 0.0);
  for (int c = 0; c < k; ++c) {
    double acc = 0.0;
    const double* row = r.row_ptr(c);
    for (int j = 0; j < k; ++j) acc += row[j] * u[static_cast<std::size_t>(j)];
    ctx.g_enum[static_cast<std::size_t>(c)] = acc;
  }

  const double t = state.total();
  for (int i = 0; i < k; ++i)
    ctx.scale_g += state.w[static_cast<std::size_t>(i)] / t *
                   std::fabs(ctx.g_closed[static_cast<std::size_t>(i)]);
  return ctx;
}

ConditionalMoments moments_from(const Vec& p, const ColumnCtx& ca, const ColumnCtx& cb,
                                bool closed) {
  const Vec& ga = closed ? ca.g_closed : ca.g_enum;
  const Vec& gb = closed ? cb.g_closed : cb.g_enum;
  const std::size_t k = p.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ma += p[i] * ga[i];
    mb += p[i] * gb[i];
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < k; ++i) cov += p[i] * (ga[i] - ma) * (gb[i] - mb);
  ConditionalMoments out;
  out.mean_a = ca.base + ma;
  out.mean_b = cb.base + mb;
  out.cov_ab = cov;
  return out;
}

// Relative gap with a floor tied to the natural magnitude of the quantity:
// entries that nearly cancel are judged against `scale`, not against their
// own (roundoff-dominated) value.
double rel_gap(double x, double y, double scale) {
  double gap = std::fabs(x - y);
  if (gap == 0.0) return 0.0;
  double denom = std::max({std::fabs(x), std::fabs(y), 1e-2 * scale, 1e-300});
  return gap / denom;
}

}  // namespace

ConditionalMomentPair one_step_conditional_moments(const UrnModel& model,
                                                   const UrnState& state, int col_a,
                                                   int col_b) {
  const int k = model.colors();
  if (col_a < 1 || col_a >= k || col_b < 1 || col_b >= k)
    fail(ErrorKind::Domain, "conditional moments need non-principal column indices");
  if (static_cast<int>(state.w.size()) != k)
    fail(ErrorKind::Domain, "state dimension does not match the model");

  ColumnCtx ca = column_ctx(model, state, col_a);
  ColumnCtx cb = column_ctx(model, state, col_b);

  const double t = state.total();
  Vec p(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = state.w[static_cast<std::size_t>(i)] / t;

  ConditionalMomentPair out;
  out.closed_form = moments_from(p, ca, cb, true);
  out.enumeration = moments_from(p, ca, cb, false);

  double scale_a = std::fabs(ca.base) + ca.scale_g;
  double scale_b = std::fabs(cb.base) + cb.scale_g;
  double scale_cov = ca.scale_g * cb.scale_g;
  out.max_rel_gap = std::max(
      {rel_gap(out.closed_form.mean_a, out.enumeration.mean_a, scale_a),
       rel_gap(out.closed_form.mean_b, out.enumeration.mean_b, scale_b),
       rel_gap(out.closed_form.cov_ab, out.enumeration.cov_ab, scale_cov)});
  return out;
}

MomentRecursion::MomentRecursion(const UrnModel& model,
                                 std::vector<std::pair<int, int>> pairs)
    : model_(&model), pairs_(std::move(pairs)) {
  const int k = model.colors();
  for (const auto& pr : pairs_) {
    for (int col : {pr.first, pr.second}) {
      if (col < 1 || col >= k)
        fail(ErrorKind::Domain, "recursion column index out of range");
      const JordanBlockSpec& b = model.block_of_column(col);
      if (b.kind != BlockKind::Real || b.d != 1)
        fail(ErrorKind::NotEigenvectorColumn,
             "exact second-moment recursion requires scalar real blocks (d = 1)");
    }
    double li = model.block_of_column(pr.first).lambda_r;
    double lj = model.block_of_column(pr.second).lambda_r;
    lambda_sum_.push_back(li + lj);
    lambda_prod_.push_back(li * lj);
    Vec prod(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i)
      prod[static_cast<std::size_t>(i)] =
          model.spec.combination(i, pr.first) * model.spec.combination(i, pr.second);
    xi_prod_.push_back(std::move(prod));
  }
  ew_ = model.initial_state;
  w0_ = model.w0();
  scratch_.assign(static_cast<std::size_t>(k), 0.0);
  m_.reserve(pairs_.size());
  for (const auto& pr : pairs_)
    m_.push_back(mean_combination(pr.first) * mean_combination(pr.second));
}

void MomentRecursion::step() {
  if (n_ >= kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "exact recursion horizon capped at 1e7 steps");
  const double inv_t = 1.0 / t();
  for (std::size_t pi = 0; pi < pairs_.size(); ++pi) {
    double q = dot(ew_, xi_prod_[pi]) * inv_t;
    m_[pi] = m_[pi] * (1.0 + lambda_sum_[pi] * inv_t) + lambda_prod_[pi] * q;
  }
  const Matrix& r = model_->replacement.matrix();
  const int k = r.rows();
  for (int j = 0; j < k; ++j) scratch_[static_cast<std::size_t>(j)] = 0.0;
  for (int i = 0; i < k; ++i) {
    double wi = ew_[static_cast<std::size_t>(i)] * inv_t;
    const double* row = r.row_ptr(i);
    for (int j = 0; j < k; ++j) scratch_[static_cast<std::size_t>(j)] += wi * row[j];
  }
  for (int j = 0; j < k; ++j) ew_[static_cast<std::size_t>(j)] += scratch_[static_cast<std::size_t>(j)];
  ++n_;
}

void MomentRecursion::advance_to(std::int64_t n) {
  if (n < n_) fail(ErrorKind::Domain, "recursion cannot step backwards");
  if (n > kMaxRecursionHorizon)
    fail(ErrorKind::Domain, "exact recursion horizon capped at 1e7 steps");
  while (n_ < n) step();
}

double MomentRecursion::mean_combination(int col) const {
  const int k = model_->colors();
  if (col < 1 || col >= k) fail(ErrorKind::Domain, "column index out of range");
  double acc = 0.0;
  for (int i = 0; i < k; ++i)
    acc += ew_[static_cast<std::size_t>(i)] * model_->spec.combination(i, col);
  return acc;
}

double MomentRecursion::central_second_moment(std::size_t pair_index) const {
  const auto& pr = pairs_[pair_index];
  return m_[pair_index] - mean_combination(pr.first) * mean_combination(pr.second);
}

double column_lambda(const UrnModel& model, int col) {
  const JordanBlockSpec& b = model.block_of_column(col);
  if (b.kind != BlockKind::Real || b.d != 1)
    fail(ErrorKind::NotEigenvectorColumn, "column is not a scalar real eigenvector column");
  return b.lambda_r;
}

}  // namespace urnclt
