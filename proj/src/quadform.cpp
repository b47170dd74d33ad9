#include "sfm/quadform.hpp"

#include <cmath>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

Matrix antisymmetrize(const Matrix& m) {
  Matrix r = m;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = 0.5 * (m(i, j) - m(j, i));
  return r;
}

}  // namespace

BilinForm::BilinForm(Subspace ambient, const Matrix& matrix, Symmetry sym, double scale)
    : ambient_(std::move(ambient)), sym_(sym) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != ambient_.dim())
    throw DomainError("BilinForm: matrix does not match ambient dimension");
  if (!matrix.all_finite()) throw InputError("BilinForm: non-finite entries");
  const double own = matrix.max_abs();
  Matrix enforced = sym == Symmetry::symmetric ? symmetrize(matrix)
                                               : antisymmetrize(matrix);
  if ((matrix - enforced).max_abs() > 1e-9 * std::max(own, 1.0))
    throw DomainError("BilinForm: matrix violates declared symmetry");
  mat_ = std::move(enforced);
  scale_ = std::max(scale, mat_.max_abs());
}

BilinForm BilinForm::on_full(const Matrix& matrix, Symmetry sym, double scale) {
  return BilinForm(Subspace::full(matrix.rows()), matrix, sym, scale);
}

BilinForm restrict(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy) {
  if (!contains(q.ambient(), s, policy))
    throw DomainError("restrict: subspace not contained in form ambient");
  Matrix c = q.ambient().coords_of(s.frame());
  Matrix m = c.transpose() * q.matrix() * c;
  return BilinForm(s, m, q.symmetry(), q.scale());
}

IndexReport index_nullity(const BilinForm& q, const TolerancePolicy& policy) {
  if (q.symmetry() != Symmetry::symmetric)
    throw DomainError("index_nullity: form is not symmetric");
  IndexReport rep;
  const int d = q.dim();
  if (d == 0) return rep;
  auto e = eigh(SymMatrix(q.matrix()));
  double norm = q.scale();
  for (double v : e.values) norm = std::max(norm, std::abs(v));
  const double theta = policy.rank_tol * norm;
  for (double v : e.values) {
    if (v < -theta)
      ++rep.index;
    else if (v <= theta)
      ++rep.nullity;
    else
      ++rep.coindex;
  }
  return rep;
}

Subspace perp(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy) {
  if (!contains(q.ambient(), s, policy))
    throw DomainError("perp: subspace not contained in form ambient");
  Matrix c = q.ambient().coords_of(s.frame());
  // Q[u, w_j] = 0 for all frame vectors w_j of s, in ambient coordinates.
  Matrix cond = c.transpose() * q.matrix().transpose();
  Subspace k = kernel(cond, policy, q.scale());
  return Subspace(q.ambient().ambient_dim(), q.ambient().lift(k.frame()));
}

Subspace form_kernel(const BilinForm& q, const TolerancePolicy& policy) {
  Subspace k = kernel(q.matrix(), policy, q.scale());
  return Subspace(q.ambient().ambient_dim(), q.ambient().lift(k.frame()));
}

std::pair<long long, long long> eq1_sides(const BilinForm& q, const Subspace& w,
                                          const TolerancePolicy& policy) {
  const long long ind_q = index_nullity(q, policy).index;
  const long long ind_qw = index_nullity(restrict(q, w, policy), policy).index;
  Subspace wperp = perp(q, w, policy);
  const long long ind_perp = index_nullity(restrict(q, wperp, policy), policy).index;
  const long long dim_w_wperp = intersect(w, wperp, policy).dim();
  const long long dim_w_ker = intersect(w, form_kernel(q, policy), policy).dim();
  return {ind_q - ind_qw, ind_perp + dim_w_wperp - dim_w_ker};
}

bool is_nondegenerate_on(const BilinForm& q, const Subspace& s, const TolerancePolicy& policy) {
  BilinForm r = restrict(q, s, policy);
  return kernel(r.matrix(), policy, r.scale()).dim() == 0;
}

}  // namespace sfm
