#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "urnclt/errors.hpp"

namespace urnclt {

using Vec = std::vector<double>;

// Dense row-major real matrix. Sizes here are tiny (color counts up to 16,
// vectorized Lyapunov systems up to 256), so the implementation favors
// clarity over blocking.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);
  static Matrix from_rows(const std::vector<Vec>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  const double* row_ptr(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }

  Vec row(int i) const;
  Vec col(int j) const;
  Matrix transpose() const;
  Matrix submatrix(int r0, int r1, int c0, int c1) const;  // half-open ranges

  double inf_norm() const;  // max absolute row sum
  double max_abs() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// y = A' x and y = A x for plain vectors.
Vec mat_vec(const Matrix& a, const Vec& x);
Vec mat_t_vec(const Matrix& a, const Vec& x);
double dot(const Vec& a, const Vec& b);

// LU decomposition with partial pivoting; Domain error on (near) singular
// input. Shared by the solvers below.
struct LuDecomposition {
  Matrix lu;
  std::vector<int> perm;
  bool singular = false;
};
LuDecomposition lu_factor(Matrix a);
Vec lu_solve(const LuDecomposition& f, Vec b);
Matrix lu_solve_matrix(const LuDecomposition& f, const Matrix& b);
Matrix inverse(const Matrix& a);

// Probability vector: nonnegative entries summing to 1 (within tol at
// construction, then renormalized exactly).
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(Vec p, double tol = 1e-12);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  const Vec& values() const { return p_; }

 private:
  Vec p_;
};

// Row-stochastic matrix. Validation: entries >= -tol (tiny negatives are
// clamped), every row sum within tol of 1; rows are then renormalized so the
// urn mass bookkeeping stays exact to roundoff.
class StochasticMatrix {
 public:
  // Trivial 1x1 placeholder; real instances come from from_matrix.
  StochasticMatrix() : m_(Matrix::identity(1)), irreducible_(true) {}

  static StochasticMatrix from_matrix(Matrix m, double tol = 1e-12);

  const Matrix& matrix() const { return m_; }
  int size() const { return m_.rows(); }
  bool irreducible() const { return irreducible_; }

 private:
  explicit StochasticMatrix(Matrix m, bool irreducible)
      : m_(std::move(m)), irreducible_(irreducible) {}
  Matrix m_;
  bool irreducible_ = false;
};

// Strong connectivity of the digraph of strictly positive entries.
bool is_irreducible(const Matrix& m);

// Unique stationary distribution pi with pi' R = pi'. Direct solve of the
// singular system with one equation replaced by the normalization, followed
// by a residual check: ||pi'R - pi'||_inf <= tol or NonConvergence.
// NotIrreducible if the positive-entry digraph is not strongly connected.
ProbabilityVector stationary_distribution(const StochasticMatrix& r, double tol = 1e-10);

// Solves A' X + X A = Q for symmetric Q by the vectorized linear system
// (small dimensions only). UnstableA unless every eigenvalue of A has real
// part above min_eig_real; NonConvergence if the residual exceeds
// tol * max(1, ||Q||_inf).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q, double tol = 1e-10,
                      double min_eig_real = 1e-12);

// Closed-form exponential exp(k1 I + k2 C + k3 F) of a commuting triple:
// identity, block rotation generator C (C^2 = -I), and nilpotent F with
// ones on the (block) superdiagonal. k2 == 0 selects the pure-real d x d
// form; otherwise the result is the 2d x 2d complex-pair form.
Matrix block_exponential(double k1, double k2, double k3, int d);

// Eigenvalues of a real square matrix by Householder Hessenberg reduction
// and Francis double-shift QR. Deflation when a subdiagonal entry drops
// below tol * (|h_ii| + |h_jj|). NonConvergence if an eigenvalue fails to
// deflate within the sweep budget.
std::vector<std::complex<double>> eigenvalues(const Matrix& a, double tol = 1e-10);

// Newton refinement of a simple eigenpair via the bordered system
// [A - lambda I, -x; e_p', 0]; updates (lambda, x) in place when the
// refined pair has a smaller residual, otherwise leaves them untouched.
void eigen_refine(const Matrix& a, std::complex<double>& lambda,
                  std::vector<std::complex<double>>& x);

// Right eigenvector for a computed eigenvalue, by inverse iteration (complex
// arithmetic when lambda is complex). The result is unnormalized.
std::vector<std::complex<double>> eigenvector(const Matrix& a, std::complex<double> lambda);

}  // namespace urnclt
