#pragma once

#include <cstddef>
#include <vector>

namespace sfm {

// Dense real matrix, row-major.  Zero rows or columns are allowed; empty
// subspaces and zero-dimensional forms are first-class values throughout
// the library.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(int i) { return a_.data() + std::size_t(i) * cols_; }
  const double* row(int i) const { return a_.data() + std::size_t(i) * cols_; }

  Matrix transpose() const;
  Matrix block(int r0, int c0, int nr, int nc) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  bool all_finite() const;
  double frob() const;
  double max_abs() const;

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

Matrix hcat(const Matrix& a, const Matrix& b);
Matrix vcat(const Matrix& a, const Matrix& b);

// X with A*X = B, partial-pivot LU.  Throws NumericError when A is
// singular to working precision.
Matrix solve(const Matrix& a, const Matrix& b);

inline Matrix symmetrize(const Matrix& m) {
  Matrix r = m;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = 0.5 * (m(i, j) + m(j, i));
  return r;
}

}  // namespace sfm
