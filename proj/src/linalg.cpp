#include "urnclt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "urnclt/rng.hpp"

namespace urnclt {

namespace {

// LU with partial pivoting over double or std::complex<double>. When
// `bump_zero_pivot` is set a vanishing pivot is replaced by a tiny value,
// which is the standard device for inverse iteration on an intentionally
// singular shifted matrix.
template <typename T>
struct GenericLu {
  int n = 0;
  std::vector<T> a;  // row-major
  std::vector<int> perm;
  bool singular = false;

  T& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T& at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  void factor(bool bump_zero_pivot, double scale) {
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      double best = std::abs(at(k, k));
      for (int i = k + 1; i < n; ++i) {
        double v = std::abs(at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (piv != k) {
        for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
        std::swap(perm[k], perm[piv]);
      }
      if (best == 0.0 || !(best > scale * 1e-300)) {
        if (!bump_zero_pivot) {
          singular = true;
          return;
        }
        // Far below roundoff so the bump never limits the accuracy of the
        // recovered null direction, yet far above the overflow threshold
        // for right-hand sides of a few units.
        at(k, k) = T(scale * 1e-280);
      }
      T inv_piv = T(1.0) / at(k, k);
      for (int i = k + 1; i < n; ++i) {
        T m = at(i, k) * inv_piv;
        at(i, k) = m;
        if (m != T(0.0)) {
          for (int j = k + 1; j < n; ++j) at(i, j) -= m * at(k, j);
        }
      }
    }
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    std::vector<T> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= at(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= at(i, j) * x[j];
      x[i] /= at(i, i);
    }
    return x;
  }
};

double sign_or_one(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// Householder reflector mapping v to a multiple of e0; applied to rows
// r..r+m-1 (left) and the matching columns (right) of the full matrix so the
// transform stays a similarity on the whole array.
void apply_similarity_reflector(Matrix& h, int r, const double* v, int m) {
  double vnorm2 = 0.0;
  for (int i = 0; i < m; ++i) vnorm2 += v[i] * v[i];
  if (vnorm2 <= 0.0) return;
  const double beta = 2.0 / vnorm2;
  const int n = h.rows();
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += v[i] * h(r + i, j);
    s *= beta;
    for (int i = 0; i < m; ++i) h(r + i, j) -= s * v[i];
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int jj = 0; jj < m; ++jj) s += h(i, r + jj) * v[jj];
    s *= beta;
    for (int jj = 0; jj < m; ++jj) h(i, r + jj) -= s * v[jj];
  }
}

// Builds the reflector for (x, y, z) -> (*, 0, 0) and applies it at row k.
void chase_reflector(Matrix& h, int k, double x, double y, double z, int m) {
  double scale = std::fabs(x) + std::fabs(y) + std::fabs(z);
  if (scale == 0.0) return;
  x /= scale;
  y /= scale;
  z /= scale;
  double norm = std::sqrt(x * x + y * y + z * z);
  double alpha = -sign_or_one(x) * norm;
  double v[3] = {x - alpha, y, z};
  apply_similarity_reflector(h, k, v, m);
}

Matrix hessenberg(Matrix a) {
  const int n = a.rows();
  for (int k = 0; k + 2 < n; ++k) {
    std::vector<double> v(n - k - 1);
    double scale = 0.0;
    for (int i = 0; i < n - k - 1; ++i) {
      v[i] = a(k + 1 + i, k);
      scale += std::fabs(v[i]);
    }
    if (scale == 0.0) continue;
    double norm2 = 0.0;
    for (auto& x : v) {
      x /= scale;
      norm2 += x * x;
    }
    double alpha = -sign_or_one(v[0]) * std::sqrt(norm2);
    v[0] -= alpha;
    apply_similarity_reflector(a, k + 1, v.data(), n - k - 1);
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
  return a;
}

// One implicit double-shift sweep on the active window [p, q], shifts given
// through their sum s and product t.
void francis_step(Matrix& h, int p, int q, double s, double t) {
  double x = h(p, p) * h(p, p) + h(p, p + 1) * h(p + 1, p) - s * h(p, p) + t;
  double y = h(p + 1, p) * (h(p, p) + h(p + 1, p + 1) - s);
  double z = (p + 2 <= q) ? h(p + 2, p + 1) * h(p + 1, p) : 0.0;
  for (int k = p; k <= q - 2; ++k) {
    chase_reflector(h, k, x, y, z, 3);
    x = h(k + 1, k);
    y = h(k + 2, k);
    z = (k + 3 <= q) ? h(k + 3, k) : 0.0;
  }
  chase_reflector(h, q - 1, x, y, 0.0, 2);
  for (int i = p + 2; i <= q; ++i)
    for (int j = p; j <= i - 2; ++j) h(i, j) = 0.0;
}

void eig2x2(double a, double b, double c, double d, std::complex<double>& l1,
            std::complex<double>& l2) {
  const double m = 0.5 * (a + d);
  const double det = a * d - b * c;
  const double disc = m * m - det;
  if (disc >= 0.0) {
    const double sd = std::sqrt(disc);
    double r1 = m >= 0.0 ? m + sd : m - sd;
    double r2 = (r1 != 0.0) ? det / r1 : m - sign_or_one(m) * sd;
    l1 = r1;
    l2 = r2;
  } else {
    const double im = std::sqrt(-disc);
    l1 = {m, im};
    l2 = {m, -im};
  }
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return Matrix();
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      fail(ErrorKind::Domain, "ragged row list for matrix construction");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vec Matrix::row(int i) const {
  Vec r(cols_);
  for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

Vec Matrix::col(int j) const {
  Vec c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::submatrix(int r0, int r1, int c0, int c1) const {
  Matrix s(r1 - r0, c1 - c0);
  for (int i = r0; i < r1; ++i)
    for (int j = c0; j < c1; ++j) s(i - r0, j - c0) = (*this)(i, j);
  return s;
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : a_) best = std::max(best, std::fabs(v));
  return best;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::Domain, "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec mat_vec(const Matrix& a, const Vec& x) {
  Vec y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Vec mat_t_vec(const Matrix& a, const Vec& x) {
  Vec y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

LuDecomposition lu_factor(Matrix a) {
  if (a.rows() != a.cols()) fail(ErrorKind::Domain, "LU of non-square matrix");
  const int n = a.rows();
  GenericLu<double> g;
  g.n = n;
  g.a.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = a(i, j);
  g.factor(false, a.max_abs() + 1.0);
  LuDecomposition f;
  f.singular = g.singular;
  f.perm = g.perm;
  f.lu = Matrix(n, n);
  if (!g.singular)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.lu(i, j) = g.at(i, j);
  return f;
}

Vec lu_solve(const LuDecomposition& f, Vec b) {
  if (f.singular) fail(ErrorKind::Domain, "singular linear system");
  const int n = f.lu.rows();
  GenericLu<double> g;
  g.n = n;
  g.a.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = f.lu(i, j);
  g.perm = f.perm;
  return g.solve(b);
}

Matrix lu_solve_matrix(const LuDecomposition& f, const Matrix& b) {
  Matrix x(b.rows(), b.cols());
  for (int j = 0; j < b.cols(); ++j) {
    Vec col = lu_solve(f, b.col(j));
    for (int i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Matrix inverse(const Matrix& a) {
  return lu_solve_matrix(lu_factor(a), Matrix::identity(a.rows()));
}

ProbabilityVector::ProbabilityVector(Vec p, double tol) : p_(std::move(p)) {
  if (p_.empty()) fail(ErrorKind::Domain, "empty probability vector");
  double sum = 0.0;
  for (double& v : p_) {
    if (v < -tol) fail(ErrorKind::Domain, "negative probability entry");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::fabs(sum - 1.0) > std::max(tol, 1e-9))
    fail(ErrorKind::Domain, "probability vector does not sum to 1");
  for (double& v : p_) v /= sum;
}

StochasticMatrix StochasticMatrix::from_matrix(Matrix m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1)
    fail(ErrorKind::NotStochastic, "replacement matrix must be square and nonempty");
  for (int i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      if (v < -tol) fail(ErrorKind::NotStochastic, "negative replacement entry");
      if (v < 0.0) m(i, j) = 0.0;
      sum += m(i, j);
    }
    if (std::fabs(sum - 1.0) > tol)
      fail(ErrorKind::NotStochastic, "replacement row does not sum to 1");
    for (int j = 0; j < m.cols(); ++j) m(i, j) /= sum;
  }
  bool irr = is_irreducible(m);
  return StochasticMatrix(std::move(m), irr);
}

bool is_irreducible(const Matrix& m) {
  const int n = m.rows();
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        double w = transpose ? m(v, u) : m(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

ProbabilityVector stationary_distribution(const StochasticMatrix& r, double tol) {
  const Matrix& m = r.matrix();
  if (!is_irreducible(m))
    fail(ErrorKind::NotIrreducible, "replacement digraph is not strongly connected");
  const int n = m.rows();
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = (i == j ? 1.0 : 0.0) - m(j, i);
  for (int j = 0; j < n; ++j) b(0, j) = 1.0;
  Vec rhs(n, 0.0);
  rhs[0] = 1.0;
  Vec pi = lu_solve(lu_factor(b), rhs);
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  for (double& v : pi) v /= sum;
  double resid = 0.0;
  Vec lhs = mat_t_vec(m, pi);
  for (int i = 0; i < n; ++i) resid = std::max(resid, std::fabs(lhs[i] - pi[i]));
  if (resid > tol)
    fail(ErrorKind::NonConvergence, "stationary solve residual above tolerance");
  return ProbabilityVector(pi, 1e-9);
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q, double tol, double min_eig_real) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
    fail(ErrorKind::Domain, "Lyapunov solve shape mismatch");
  const int n = a.rows();
  for (const auto& ev : eigenvalues(a)) {
    if (ev.real() <= min_eig_real)
      fail(ErrorKind::UnstableA, "coefficient matrix has a nonpositive eigenvalue real part");
  }
  // Unknowns x[i*n+j] = X(i,j); equation (i,j): sum_k A(k,i) X(k,j) + X(i,k) A(k,j) = Q(i,j).
  const int nn = n * n;
  GenericLu<double> g;
  g.n = nn;
  g.a.assign(static_cast<std::size_t>(nn) * nn, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int eq = i * n + j;
      for (int k = 0; k < n; ++k) {
        g.at(eq, k * n + j) += a(k, i);
        g.at(eq, i * n + k) += a(k, j);
      }
    }
  g.factor(false, a.max_abs() + 1.0);
  if (g.singular) fail(ErrorKind::UnstableA, "vectorized Lyapunov system is singular");
  std::vector<double> rhs(nn);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs[i * n + j] = q(i, j);
  std::vector<double> x = g.solve(rhs);
  Matrix sigma(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sigma(i, j) = x[i * n + j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double s = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = s;
      sigma(j, i) = s;
    }
  Matrix resid = a.transpose() * sigma + sigma * a - q;
  if (resid.max_abs() > tol * std::max(1.0, q.inf_norm()))
    fail(ErrorKind::NonConvergence, "Lyapunov residual above tolerance");
  return sigma;
}

Matrix block_exponential(double k1, double k2, double k3, int d) {
  if (d < 1) fail(ErrorKind::Domain, "block dimension must be positive");
  const double e = std::exp(k1);
  if (k2 == 0.0) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      double term = e;
      for (int j = 0; i + j < d; ++j) {
        m(i, i + j) = term;
        term *= k3 / static_cast<double>(j + 1);
      }
    }
    return m;
  }
  const double c = std::cos(k2), s = std::sin(k2);
  Matrix m(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    double term = e;
    for (int j = 0; i + j < d; ++j) {
      const int r = 2 * i, col = 2 * (i + j);
      m(r, col) = term * c;
      m(r, col + 1) = term * s;
      m(r + 1, col) = -term * s;
      m(r + 1, col + 1) = term * c;
      term *= k3 / static_cast<double>(j + 1);
    }
  }
  return m;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) fail(ErrorKind::Domain, "eigenvalues of non-square matrix");
  const int n = a.rows();
  std::vector<std::complex<double>> out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = a(0, 0);
    return out;
  }
  Matrix h = hessenberg(a);
  const double hnorm = std::max(h.inf_norm(), 1e-300);
  int q = n - 1;
  int sweeps = 0;
  while (q >= 0) {
    if (q == 0) {
      out[0] = h(0, 0);
      break;
    }
    int p = q;
    while (p > 0) {
      double s = std::fabs(h(p - 1, p - 1)) + std::fabs(h(p, p));
      if (s == 0.0) s = hnorm;
      if (std::fabs(h(p, p - 1)) < tol * s) {
        h(p, p - 1) = 0.0;
        break;
      }
      --p;
    }
    if (p == q) {
      out[q] = h(q, q);
      --q;
      sweeps = 0;
    } else if (p == q - 1) {
      eig2x2(h(q - 1, q - 1), h(q - 1, q), h(q, q - 1), h(q, q), out[q - 1], out[q]);
      q -= 2;
      sweeps = 0;
    } else {
      ++sweeps;
      if (sweeps > 60)
        fail(ErrorKind::NonConvergence, "QR iteration failed to deflate an eigenvalue");
      double s = h(q - 1, q - 1) + h(q, q);
      double t = h(q - 1, q - 1) * h(q, q) - h(q - 1, q) * h(q, q - 1);
      if (sweeps % 12 == 0) {
        // Exceptional shift to break symmetric stalls.
        double ex = std::fabs(h(q, q - 1)) + std::fabs(h(q - 1, q - 2));
        s = 1.5 * ex;
        t = -0.4375 * ex * ex;
      }
      francis_step(h, p, q, s, t);
    }
  }
  return out;
}

std::vector<std::complex<double>> eigenvector(const Matrix& a, std::complex<double> lambda) {
  const int n = a.rows();
  using C = std::complex<double>;
  const double scale = a.max_abs() + std::abs(lambda) + 1.0;
  GenericLu<C> g;
  g.n = n;
  g.a.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = C(a(i, j)) - (i == j ? lambda : C(0.0));
  g.factor(true, scale);

  std::vector<C> x(n);
  RngStream seed_stream(0x75726E636C74ULL);
  for (int i = 0; i < n; ++i) x[i] = C(0.5 + seed_stream.next_double(), 0.0);
  // Iterate to the numerical floor, keeping the best iterate: downstream
  // oracles compare lambda*x against A*x, so the residual must sit at
  // machine level, not merely below a loose acceptance cut.
  std::vector<C> best;
  double best_resid = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 8; ++iter) {
    x = g.solve(x);
    double norm = 0.0;
    for (const auto& v : x) norm = std::max(norm, std::abs(v));
    if (!(norm > 0.0) || !std::isfinite(norm))
      fail(ErrorKind::NonConvergence, "inverse iteration produced a degenerate vector");
    for (auto& v : x) v /= norm;
    // Residual ||A x - lambda x||_inf relative to the matrix scale.
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      C acc = -lambda * x[i];
      for (int j = 0; j < n; ++j) acc += a(i, j) * x[j];
      resid = std::max(resid, std::abs(acc));
    }
    if (resid < best_resid) {
      best_resid = resid;
      best = x;
    }
    if (best_resid <= 8.0 * std::numeric_limits<double>::epsilon() * scale) break;
  }
  if (best_resid > 1e-11 * scale)
    fail(ErrorKind::NonConvergence, "inverse iteration residual above tolerance");
  return best;
}

void eigen_refine(const Matrix& a, std::complex<double>& lambda,
                  std::vector<std::complex<double>>& x) {
  const int n = a.rows();
  using C = std::complex<double>;
  if (static_cast<int>(x.size()) != n) return;
  std::size_t p = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[p])) p = i;
  if (!(std::abs(x[p]) > 0.0)) return;
  const double scale = a.max_abs() + std::abs(lambda) + 1.0;

  auto residual = [&](C lam, const std::vector<C>& v) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      C acc = -lam * v[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) acc += a(i, j) * v[static_cast<std::size_t>(j)];
      r = std::max(r, std::abs(acc));
    }
    return r;
  };

  C lam = lambda;
  std::vector<C> v = x;
  double best_resid = residual(lam, v);
  C best_lam = lam;
  std::vector<C> best_v = v;

  const int m = n + 1;
  for (int step = 0; step < 3; ++step) {
    if (best_resid <= std::numeric_limits<double>::epsilon() * scale) break;
    GenericLu<C> g;
    g.n = m;
    g.a.assign(static_cast<std::size_t>(m) * m, C(0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g.at(i, j) = C(a(i, j)) - (i == j ? lam : C(0.0));
      g.at(i, n) = -v[static_cast<std::size_t>(i)];
    }
    g.at(n, static_cast<int>(p)) = C(1.0);
    g.factor(false, scale);
    if (g.singular) break;
    std::vector<C> rhs(static_cast<std::size_t>(m), C(0.0));
    for (int i = 0; i < n; ++i) {
      C acc = -lam * v[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) acc += a(i, j) * v[static_cast<std::size_t>(j)];
      rhs[static_cast<std::size_t>(i)] = -acc;
    }
    std::vector<C> sol = g.solve(rhs);
    bool finite = true;
    for (const auto& s : sol)
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) finite = false;
    if (!finite) break;
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] += sol[static_cast<std::size_t>(i)];
    lam += sol[static_cast<std::size_t>(n)];
    double r = residual(lam, v);
    if (r < best_resid) {
      best_resid = r;
      best_lam = lam;
      best_v = v;
    }
  }
  lambda = best_lam;
  x = std::move(best_v);
}

}  // namespace urnclt
