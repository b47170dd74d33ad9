#include "sfm/numkern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sfm/errors.hpp"
#include "sfm/kernels.hpp"

namespace sfm {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("SymMatrix: not square");
  if (!m.all_finite()) throw InputError("SymMatrix: non-finite entries");
  m_ = symmetrize(m);
}

SymMatrix SymMatrix::diag(const std::vector<double>& d) {
  Matrix m(int(d.size()), int(d.size()));
  for (int i = 0; i < int(d.size()); ++i) m(i, i) = d[i];
  return SymMatrix(m);
}

EighResult eigh(const Matrix& m) { return eigh(SymMatrix(m)); }

EighResult eigh(const SymMatrix& sm) {
  const int n = sm.dim();
  Matrix a = sm.mat();
  // Vt rows are the (future) eigenvector columns; rotating rows keeps the
  // inner loops contiguous for the vector kernels.
  Matrix vt = Matrix::identity(n);
  const auto& ops = kern::active_ops();

  const double scale = a.max_abs();
  if (scale > 0.0) {
    std::vector<double> tp(n), tq(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
      double off = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
      if (std::sqrt(off) <= 1e-15 * scale * n) break;
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::abs(apq) <= 1e-18 * scale) continue;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          // a <- J^T a J with the (p,q) rotation J = [[c, s], [-s, c]].
          for (int k = 0; k < n; ++k) {
            tp[k] = a(k, p);
            tq[k] = a(k, q);
          }
          ops.rot(tp.data(), tq.data(), c, s, std::size_t(n));
          for (int k = 0; k < n; ++k) {
            a(k, p) = tp[k];
            a(k, q) = tq[k];
          }
          ops.rot(a.row(p), a.row(q), c, s, std::size_t(n));
          ops.rot(vt.row(p), vt.row(q), c, s, std::size_t(n));
          a(p, q) = 0.0;
          a(q, p) = 0.0;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i) < a(j, j); });
  EighResult r;
  r.values.resize(n);
  r.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    r.values[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) r.vectors(i, k) = vt(order[k], i);
  }
  return r;
}

SvdResult svd(const Matrix& m) {
  if (!m.all_finite()) throw InputError("svd: non-finite entries");
  const int rows = m.rows();
  const int cols = m.cols();
  // g rows hold the columns of m, orthogonalized by Jacobi rotations.
  Matrix g = m.transpose();
  Matrix vt = Matrix::identity(cols);
  const auto& ops = kern::active_ops();

  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < cols - 1; ++i) {
      for (int j = i + 1; j < cols; ++j) {
        const double gii = ops.dot(g.row(i), g.row(i), std::size_t(rows));
        const double gjj = ops.dot(g.row(j), g.row(j), std::size_t(rows));
        const double gij = ops.dot(g.row(i), g.row(j), std::size_t(rows));
        if (gii == 0.0 || gjj == 0.0) continue;
        if (std::abs(gij) <= 1e-16 * std::sqrt(gii * gjj)) continue;
        rotated = true;
        const double zeta = (gjj - gii) / (2.0 * gij);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        ops.rot(g.row(i), g.row(j), c, s, std::size_t(rows));
        ops.rot(vt.row(i), vt.row(j), c, s, std::size_t(cols));
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sig(cols);
  for (int i = 0; i < cols; ++i)
    sig[i] = std::sqrt(ops.dot(g.row(i), g.row(i), std::size_t(rows)));
  std::vector<int> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sig[a] > sig[b]; });

  SvdResult r;
  r.u = Matrix(rows, cols);
  r.v = Matrix(cols, cols);
  r.sigma.resize(cols);
  for (int k = 0; k < cols; ++k) {
    const int src = order[k];
    r.sigma[k] = sig[src];
    for (int i = 0; i < cols; ++i) r.v(i, k) = vt(src, i);
    if (sig[src] > 0.0) {
      for (int i = 0; i < rows; ++i) r.u(i, k) = g(src, i) / sig[src];
    }
  }
  return r;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  auto s = svd(m);
  return s.sigma.empty() ? 0.0 : s.sigma.front();
}

Subspace::Subspace(int ambient_dim, const Matrix& frame)
    : ambient_(ambient_dim), frame_(frame) {
  if (frame.rows() != ambient_dim || frame.cols() > ambient_dim)
    throw DomainError("Subspace: frame shape");
  if (!frame.all_finite()) throw InputError("Subspace: non-finite frame");
  Matrix g = frame_.transpose() * frame_;
  g -= Matrix::identity(frame_.cols());
  if (g.max_abs() > 1e-6) throw DomainError("Subspace: frame not orthonormal");
}

Subspace Subspace::zero(int ambient_dim) {
  return Subspace(ambient_dim, Matrix(ambient_dim, 0));
}

Subspace Subspace::full(int ambient_dim) {
  return Subspace(ambient_dim, Matrix::identity(ambient_dim));
}

Subspace Subspace::span_of(const Matrix& columns, const TolerancePolicy& policy) {
  return column_space(columns, policy);
}

double Subspace::max_angle_to(const Subspace& s) const {
  if (dim() == 0) return 0.0;
  // sin of the largest angle: residual of this frame after projecting onto s.
  Matrix res = frame_ - s.frame() * (s.frame().transpose() * frame_);
  double sn = spectral_norm(res);
  sn = std::clamp(sn, 0.0, 1.0);
  return std::asin(sn);
}

Subspace column_space(const Matrix& m, const TolerancePolicy& policy) {
  const int n = m.rows();
  if (m.cols() == 0) return Subspace::zero(n);
  auto s = svd(m);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  int rank = 0;
  while (rank < int(s.sigma.size()) && s.sigma[rank] > policy.rank_tol * smax && s.sigma[rank] > 0.0)
    ++rank;
  return Subspace(n, s.u.block(0, 0, n, rank));
}

Subspace kernel(const Matrix& m, const TolerancePolicy& policy, double scale) {
  const int n = m.cols();
  if (n == 0) return Subspace::zero(0);
  if (m.rows() == 0) return Subspace::full(n);
  auto s = svd(m);
  const double smax = std::max(s.sigma.front(), scale);
  if (smax == 0.0) return Subspace::full(n);
  int rank = 0;
  while (rank < n && s.sigma[rank] > policy.rank_tol * smax) ++rank;
  return Subspace(n, s.v.block(0, rank, n, n - rank));
}

Subspace intersect(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy) {
  if (s1.ambient_dim() != s2.ambient_dim())
    throw DomainError("intersect: ambient mismatch");
  const int n = s1.ambient_dim();
  if (s1.dim() == 0 || s2.dim() == 0) return Subspace::zero(n);
  // x is in both subspaces iff both projection residuals vanish; the
  // singular values of the stacked residual map are ~ the angles to the
  // two subspaces, so an absolute angle_tol threshold applies.
  Matrix r1 = Matrix::identity(n) - s1.frame() * s1.frame().transpose();
  Matrix r2 = Matrix::identity(n) - s2.frame() * s2.frame().transpose();
  Matrix stacked = vcat(r1, r2);
  auto s = svd(stacked);
  int keep = 0;
  for (int i = n - 1; i >= 0; --i) {
    if (s.sigma[i] <= policy.angle_tol)
      ++keep;
    else
      break;
  }
  return Subspace(n, s.v.block(0, n - keep, n, keep));
}

Subspace sum(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy) {
  if (s1.ambient_dim() != s2.ambient_dim())
    throw DomainError("sum: ambient mismatch");
  return column_space(hcat(s1.frame(), s2.frame()), policy);
}

std::vector<double> principal_angles(const Subspace& s1, const Subspace& s2) {
  if (s1.ambient_dim() != s2.ambient_dim())
    throw DomainError("principal_angles: ambient mismatch");
  const int r = std::min(s1.dim(), s2.dim());
  if (r == 0) return {};
  auto s = svd(s1.frame().transpose() * s2.frame());
  std::vector<double> angles(r);
  for (int i = 0; i < r; ++i)
    angles[i] = std::acos(std::clamp(s.sigma[i], 0.0, 1.0));
  std::sort(angles.begin(), angles.end());
  return angles;
}

bool subspaces_equal(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy) {
  if (s1.ambient_dim() != s2.ambient_dim())
    throw DomainError("subspaces_equal: ambient mismatch");
  if (s1.dim() != s2.dim()) return false;
  if (s1.dim() == 0) return true;
  return s1.max_angle_to(s2) <= policy.angle_tol;
}

bool contains(const Subspace& outer, const Subspace& inner, const TolerancePolicy& policy) {
  if (outer.ambient_dim() != inner.ambient_dim())
    throw DomainError("contains: ambient mismatch");
  if (inner.dim() == 0) return true;
  if (inner.dim() > outer.dim()) return false;
  return inner.max_angle_to(outer) <= policy.angle_tol;
}

}  // namespace sfm
