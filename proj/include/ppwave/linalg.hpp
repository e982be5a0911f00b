#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ppwave/error.hpp"

namespace ppwave {

/// Dense square matrix of doubles, row-major. Dimensions here are tiny
/// (n+2 <= a handful), so no effort is spent on blocking or expression
/// templates.
class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t n, double fill = 0.0) : n_(n), d_(n * n, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

  Mat transposed() const {
    Mat t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Mat operator-(const Mat& a, const Mat& b) {
    Mat c(a.n_);
    for (std::size_t i = 0; i < a.n_ * a.n_; ++i) c.d_[i] = a.d_[i] - b.d_[i];
    return c;
  }

  std::vector<double> operator*(const std::vector<double>& v) const {
    std::vector<double> r(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : d_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Gauss-Jordan inverse with partial pivoting. Throws Error(Numeric) when a
/// pivot falls below the tolerance.
inline Mat inverse(const Mat& a, double pivot_tol = 1e-13) {
  std::size_t n = a.size();
  Mat work = a;
  Mat inv = Mat::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (std::abs(work(pivot, col)) < pivot_tol)
      fail(ErrorKind::Numeric, "singular matrix in inverse()");
    if (pivot != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    double scale = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// True if the symmetric matrix is positive definite (Cholesky succeeds).
inline bool positive_definite(const Mat& a) {
  std::size_t n = a.size();
  Mat l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

inline double determinant(const Mat& a) {
  std::size_t n = a.size();
  Mat work = a;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (work(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      det = -det;
      for (std::size_t j = 0; j < n; ++j) std::swap(work(pivot, j), work(col, j));
    }
    det *= work(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = work(r, col) / work(col, col);
      for (std::size_t j = col; j < n; ++j) work(r, j) -= f * work(col, j);
    }
  }
  return det;
}

}  // namespace ppwave
