#pragma once

#include "sfm/numkern.hpp"

namespace sfm {

enum class Symmetry { symmetric, skew };

// A bounded bilinear form, held as a dense matrix in the coordinates of
// its ambient frame (the full space when ambient is the identity frame).
class BilinForm {
 public:
  BilinForm() = default;
  // `scale` is the norm of the problem the form came from; rank and index
  // thresholds use max(scale, ||matrix||) so that a restriction of a form
  // to a (numerically) null subspace reads as the zero form instead of
  // rounding noise.  scale = 0 means "own norm".
  BilinForm(Subspace ambient, const Matrix& matrix, Symmetry sym, double scale = 0.0);

  // Form on R^n.
  static BilinForm on_full(const Matrix& matrix, Symmetry sym, double scale = 0.0);

  const Subspace& ambient() const { return ambient_; }
  int dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  Symmetry symmetry() const { return sym_; }
  double scale() const { return scale_; }

 private:
  Subspace ambient_;
  Matrix mat_;
  Symmetry sym_ = Symmetry::symmetric;
  double scale_ = 0.0;
};

struct IndexReport {
  int index = 0;    // eigenvalues < -rank_tol*||matrix||
  int nullity = 0;  // within +-rank_tol*||matrix||
  int coindex = 0;
};

// Form restricted to s (which must lie inside q's ambient): frame^T*Q*frame.
BilinForm restrict(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy);

IndexReport index_nullity(const BilinForm& q, const TolerancePolicy& policy);

// Q-orthogonal complement of s inside q's ambient, as a subspace of the
// enclosing R^n.  Works for symmetric and skew forms alike.
Subspace perp(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy);

// Radical of the form, as a subspace of the enclosing R^n.
Subspace form_kernel(const BilinForm& q, const TolerancePolicy& policy);

// Both sides of the finite-dimensional index-restriction identity:
//   lhs = ind Q - ind Q|_W
//   rhs = ind Q|_{W^perpQ} + dim(W n W^perpQ) - dim(W n ker Q)
std::pair<long long, long long> eq1_sides(const BilinForm& q, const Subspace& w,
                                          const TolerancePolicy& policy);

bool is_nondegenerate_on(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy);

}  // namespace sfm
