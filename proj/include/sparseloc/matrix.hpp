#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sparseloc {

/// Dense row-major matrix; just enough linear algebra for influence analysis.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("Matrix: shape mismatch in difference");
    Matrix c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.a_[i] - b.a_[i];
    return c;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

inline constexpr int kJacobiMaxDim = 64;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending. Off-diagonal mass is driven below 1e-12 relative to the
/// Frobenius norm (or absolutely, for tiny matrices).
inline std::vector<double> jacobi_eigenvalues(Matrix a, double tol = 1e-12) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigenvalues: matrix not square");
  if (n > kJacobiMaxDim) throw std::invalid_argument("jacobi_eigenvalues: dimension above 64");
  double fro = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
  const double stop = tol * std::max(1.0, std::sqrt(fro));

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= stop) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration from the all-ones vector; converges to relative tolerance 1e-10.
inline double power_iteration_top(const Matrix& a, double rel_tol = 1e-10,
                                  int max_iter = 100000) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("power_iteration_top: matrix not square");
  std::vector<double> x(static_cast<std::size_t>(n), 1.0), y(static_cast<std::size_t>(n));
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s;
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    double ray = 0.0;
    for (int i = 0; i < n; ++i) ray += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / norm;
    if (it > 0 && std::fabs(ray - lambda) <= rel_tol * std::max(1.0, std::fabs(ray))) return ray;
    lambda = ray;
  }
  return lambda;
}

/// Squared singular values of A, i.e. eigenvalues of A^T A, clamped at zero.
inline std::vector<double> squared_singular_values(const Matrix& a) {
  Matrix g = a.transpose() * a;
  auto ev = jacobi_eigenvalues(g);
  for (double& v : ev) v = std::max(v, 0.0);
  return ev;
}

/// Largest singular value. Jacobi on the Gram matrix up to dimension 64,
/// power iteration beyond that.
inline double operator_norm(const Matrix& a) {
  const bool wide = a.cols() > a.rows();
  const Matrix g = wide ? a * a.transpose() : a.transpose() * a;
  double top;
  if (g.rows() <= kJacobiMaxDim) {
    const auto ev = jacobi_eigenvalues(g);
    top = ev.empty() ? 0.0 : std::max(ev.front(), 0.0);
  } else {
    top = std::max(power_iteration_top(g), 0.0);
  }
  return std::sqrt(top);
}

struct MatrixNorms {
  double op;            // largest singular value
  double one_to_one;    // max absolute column sum
  double inf_to_inf;    // max absolute row sum
};

inline MatrixNorms matrix_norms(const Matrix& a) {
  MatrixNorms out{operator_norm(a), 0.0, 0.0};
  for (int j = 0; j < a.cols(); ++j) {
    double col = 0.0;
    for (int i = 0; i < a.rows(); ++i) col += std::fabs(a(i, j));
    out.one_to_one = std::max(out.one_to_one, col);
  }
  for (int i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < a.cols(); ++j) row += std::fabs(a(i, j));
    out.inf_to_inf = std::max(out.inf_to_inf, row);
  }
  return out;
}

/// tr(A^p) for p >= 1, by repeated multiplication.
inline double trace_power(const Matrix& a, int p) {
  if (a.rows() != a.cols()) throw std::invalid_argument("trace_power: matrix not square");
  if (p < 1) throw std::invalid_argument("trace_power: p must be >= 1");
  Matrix m = a;
  for (int i = 1; i < p; ++i) m = m * a;
  long double tr = 0.0L;
  for (int i = 0; i < a.rows(); ++i) tr += m(i, i);
  return static_cast<double>(tr);
}

}  // namespace sparseloc
