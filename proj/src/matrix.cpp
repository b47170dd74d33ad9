#include "sfm/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "sfm/errors.hpp"
#include "sfm/kernels.hpp"

namespace sfm {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(int r0, int c0, int nr, int nc) const {
  Matrix b(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
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
  kern::active_ops().scal(s, a_.data(), a_.size());
  return *this;
}

bool Matrix::all_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Matrix::frob() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      kern::active_ops().axpy(aik, b.row(k), c.row(i), b.cols());
    }
  }
  return c;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0 && a.rows() == 0) return b;
  if (b.cols() == 0 && b.rows() == 0) return a;
  Matrix c(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() + b.rows(), a.cols() ? a.cols() : b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) c(a.rows() + i, j) = b(i, j);
  return c;
}

Matrix solve(const Matrix& a, const Matrix& b) {
  const int n = a.rows();
  if (a.cols() != n || b.rows() != n) throw DomainError("solve: shape mismatch");
  Matrix lu = a;
  Matrix x = b;
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw NumericError("solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
      for (int j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(p, j));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (int j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < x.cols(); ++j) {
      double s = x(k, j);
      for (int i = k + 1; i < n; ++i) s -= lu(k, i) * x(i, j);
      x(k, j) = s / lu(k, k);
    }
  }
  return x;
}

}  // namespace sfm
