#pragma once

#include <vector>

#include "sfm/matrix.hpp"

namespace sfm {

// The single tolerance policy every rank / dimension decision routes
// through.  Results are reproducible given (input, policy).
struct TolerancePolicy {
  double rank_tol = 1e-9;   // absolute threshold after scaling by matrix norm
  double angle_tol = 1e-8;  // radians, subspace equality
  int refine_limit = 40;    // max mesh refinements
};

// Symmetric matrix; symmetrized on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);
  static SymMatrix diag(const std::vector<double>& d);

  int dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

struct EighResult {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns, pairwise orthonormal
};

// Cyclic Jacobi eigendecomposition.  Reconstruction error is bounded by
// c*n*eps*||m|| with c ~ 10 for the dimensions this library targets.
EighResult eigh(const SymMatrix& m);
EighResult eigh(const Matrix& m);  // symmetrizes first

struct SvdResult {
  Matrix u;                    // rows(m) x cols(m); columns past the rank are zero
  std::vector<double> sigma;   // descending, length cols(m)
  Matrix v;                    // cols(m) x cols(m), orthogonal
};

// One-sided Jacobi SVD; accurate small singular values, full V.
SvdResult svd(const Matrix& m);

// Largest singular value (0 for empty matrices).
double spectral_norm(const Matrix& m);

// A linear subspace of R^n held as an orthonormal frame (columns).
// d = 0 (empty frame) is allowed.
class Subspace {
 public:
  Subspace() : ambient_(0) {}
  // Validates orthonormality of the frame.
  Subspace(int ambient_dim, const Matrix& frame);

  static Subspace zero(int ambient_dim);
  static Subspace full(int ambient_dim);
  static Subspace span_of(const Matrix& columns, const TolerancePolicy& policy);

  int ambient_dim() const { return ambient_; }
  int dim() const { return frame_.cols(); }
  const Matrix& frame() const { return frame_; }

  // Coordinates of ambient vectors in this frame (frame^T * x); only
  // meaningful for vectors lying in the subspace.
  Matrix coords_of(const Matrix& x) const { return frame_.transpose() * x; }
  // Ambient vectors from frame coordinates.
  Matrix lift(const Matrix& coords) const { return frame_ * coords; }

  // max principal angle from *this into s (containment test helper):
  // largest sine of the angle between a unit vector here and s.
  double max_angle_to(const Subspace& s) const;

 private:
  int ambient_;
  Matrix frame_;
};

Subspace column_space(const Matrix& m, const TolerancePolicy& policy);
// `scale` is an external norm floor for the rank threshold, so that a
// matrix whose entries are pure rounding noise relative to the problem it
// came from is treated as zero.
Subspace kernel(const Matrix& m, const TolerancePolicy& policy, double scale = 0.0);
Subspace intersect(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy);
Subspace sum(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy);

// Ascending, in [0, pi/2]; computed from singular values of frame1^T*frame2.
std::vector<double> principal_angles(const Subspace& s1, const Subspace& s2);

bool subspaces_equal(const Subspace& s1, const Subspace& s2, const TolerancePolicy& policy);

// true iff every direction of inner lies in outer within angle_tol.
bool contains(const Subspace& outer, const Subspace& inner, const TolerancePolicy& policy);

}  // namespace sfm
