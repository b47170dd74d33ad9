#include "sfm/reduction.hpp"

#include <cmath>
#include <string>

#include "sfm/errors.hpp"

namespace sfm {

ReductionSetup make_reduction(const SymplecticSpace& space, const Subspace& w,
                              const TolerancePolicy& policy) {
  if (w.ambient_dim() != space.dim)
    throw DomainError("make_reduction: subspace ambient mismatch");
  BilinForm omega = space.form();
  Subspace w_perp = perp(omega, w, policy);
  if (!contains(w, w_perp, policy))
    throw DomainError("make_reduction: subspace is not coisotropic");
  const int k = space.dim - w.dim();
  if (w_perp.dim() != k)
    throw NumericError("make_reduction: omega-perp has unexpected dimension");
  if (space.dim - 2 * k <= 0)
    throw DomainError("make_reduction: reduction to dimension zero is not supported");

  Subspace reduced_coords = w;
  if (k > 0) {
    Matrix resid = w.frame() - w_perp.frame() * (w_perp.frame().transpose() * w.frame());
    reduced_coords = column_space(resid, policy);
  }
  if (reduced_coords.dim() != space.dim - 2 * k)
    throw NumericError("make_reduction: reduced coordinate dimension mismatch");
  Matrix omega_red =
      reduced_coords.frame().transpose() * space.omega * reduced_coords.frame();
  SymplecticSpace reduced(space.dim - 2 * k, omega_red);

  ReductionSetup setup{space, w, w_perp, reduced_coords, reduced};

  // quotient property: omega_red[q u, q v] = omega[u, v] on w
  Matrix qw = setup.q_map(w.frame());
  Matrix lhs = qw.transpose() * omega_red * qw;
  Matrix rhs = w.frame().transpose() * space.omega * w.frame();
  if ((lhs - rhs).max_abs() > 1e-8 * std::max(1.0, space.omega.max_abs()))
    throw NumericError("make_reduction: induced form does not descend");
  return setup;
}

Lagrangian reduce_lagrangian(const ReductionSetup& setup, const Lagrangian& l,
                             const TolerancePolicy& policy) {
  if (intersect(l.sub, setup.w_perp, policy).dim() != 0)
    throw DomainError("reduce_lagrangian: Lagrangian meets the omega-perp of w");
  Subspace s = intersect(l.sub, setup.w, policy);
  Subspace red = column_space(setup.q_map(s.frame()), policy);
  return make_lagrangian(setup.reduced, red, policy);
}

LagrangianPath reduce_path(const ReductionSetup& setup, const LagrangianPath& path,
                           const TolerancePolicy& policy) {
  std::vector<Subspace> frames;
  frames.reserve(path.frames.size());
  for (std::size_t i = 0; i < path.frames.size(); ++i) {
    if (intersect(path.frames[i], setup.w_perp, policy).dim() != 0)
      throw DomainError("reduce_path: sample " + std::to_string(i) +
                        " meets the omega-perp of w");
    Lagrangian l{setup.space, path.frames[i]};
    frames.push_back(reduce_lagrangian(setup, l, policy).sub);
  }
  std::function<Subspace(double)> red_sampler;
  if (path.sampler) {
    auto src = path.sampler;
    SymplecticSpace sp = setup.space;
    ReductionSetup st = setup;
    TolerancePolicy pol = policy;
    red_sampler = [src, sp, st, pol](double t) {
      return reduce_lagrangian(st, Lagrangian{sp, src(t)}, pol).sub;
    };
  }
  return make_lagrangian_path(setup.reduced, path.mesh, std::move(frames), policy,
                              path.max_step_angle, std::move(red_sampler));
}

namespace {

struct EForm {
  Subspace e;   // pi(l n (L0 + w_perp)), a subspace of the ambient inside l0
  Matrix qmat;  // the form q_t in e's frame coordinates
};

// Assembles E_t and the form q_t[u, v] = omega[(pi|_E)^{-1} u, v] for one
// Lagrangian sample.
EForm e_form_at(const ReductionSetup& setup, const Subspace& ell, const Lagrangian& l0,
                const TolerancePolicy& policy) {
  const int n = setup.space.half_dim();
  const int k = setup.codim();
  Matrix d = hcat(l0.sub.frame(), setup.w_perp.frame());
  Subspace dspan = column_space(d, policy);
  if (dspan.dim() != n + k)
    throw DomainError("correction_terms: L0 + w_perp is not a direct sum");
  Subspace s = intersect(ell, dspan, policy);
  const int e_dim = s.dim();
  if (e_dim == 0) return {Subspace::zero(setup.space.dim), Matrix(0, 0)};

  // decompose s-frame in the direct sum: d * [x; y] = frame
  Matrix dtd = d.transpose() * d;
  Matrix z = solve(dtd, d.transpose() * s.frame());
  Matrix x = z.block(0, 0, n, e_dim);
  Matrix proj = l0.sub.frame() * x;  // pi of the frame vectors
  Subspace e = column_space(proj, policy);
  if (e.dim() != e_dim)
    throw NumericError("correction_terms: projection onto L0 lost rank");

  // unique preimage in l(t) n (L0 + w_perp) of each frame vector of e
  Matrix alpha = l0.sub.coords_of(e.frame());  // n x e
  Matrix xtx = x.transpose() * x;
  Matrix coef = solve(xtx, x.transpose() * alpha);  // e x e
  Matrix residual = l0.sub.frame() * (x * coef) - e.frame();
  if (residual.max_abs() > 1e-6)
    throw NumericError("correction_terms: preimage solve ill-conditioned, residual " +
                       std::to_string(residual.max_abs()));
  Matrix preimages = s.frame() * coef;  // 2n x e
  Matrix qmat = preimages.transpose() * setup.space.omega * e.frame();
  if ((qmat - qmat.transpose()).max_abs() > 1e-6 * std::max(1.0, qmat.max_abs()))
    throw NumericError("correction_terms: q_t failed its symmetry check");
  return {e, symmetrize(qmat)};
}

const Subspace& end_frame(const LagrangianPath& path, PathEnd t_end) {
  return t_end == PathEnd::a ? path.frames.front() : path.frames.back();
}

}  // namespace

CorrectionTerms correction_terms(const ReductionSetup& setup, const LagrangianPath& path,
                                 const Lagrangian& l0, PathEnd t_end,
                                 const TolerancePolicy& policy) {
  if (intersect(l0.sub, setup.w_perp, policy).dim() != 0)
    throw DomainError("correction_terms: L0 meets the omega-perp of w");
  const Subspace& ell = end_frame(path, t_end);
  if (intersect(ell, setup.w_perp, policy).dim() != 0)
    throw DomainError("correction_terms: endpoint sample outside the admissible set");

  Subspace v = intersect(l0.sub, setup.w, policy);
  EForm ef = e_form_at(setup, ell, l0, policy);

  CorrectionTerms terms;
  terms.e_dim = ef.e.dim();
  if (ef.e.dim() > 0)
    terms.ind_q = index_nullity(BilinForm(ef.e, ef.qmat, Symmetry::symmetric,
                                          spectral_norm(setup.space.omega)),
                                policy)
                      .index;

  // pi(l n (V + w_perp)): same projection applied to a smaller intersection
  Subspace vw = sum(v, setup.w_perp, policy);
  Subspace s2 = intersect(ell, vw, policy);
  if (s2.dim() > 0) {
    const int n = setup.space.half_dim();
    Matrix d = hcat(l0.sub.frame(), setup.w_perp.frame());
    Matrix dtd = d.transpose() * d;
    Matrix z = solve(dtd, d.transpose() * s2.frame());
    Matrix proj = l0.sub.frame() * z.block(0, 0, n, s2.dim());
    terms.dim_pi_V = column_space(proj, policy).dim();
  }
  terms.dim_lV = intersect(ell, v, policy).dim();
  return terms;
}

std::pair<long long, long long> theorem2_sides(const ReductionSetup& setup,
                                               const LagrangianPath& path,
                                               const Lagrangian& l0,
                                               const TolerancePolicy& policy) {
  const long long mu = maslov_index(path, l0, policy);
  LagrangianPath red = reduce_path(setup, path, policy);
  Lagrangian red_l0 = reduce_lagrangian(setup, l0, policy);
  const long long mu_red = maslov_index(red, red_l0, policy);

  CorrectionTerms ca = correction_terms(setup, path, l0, PathEnd::a, policy);
  CorrectionTerms cb = correction_terms(setup, path, l0, PathEnd::b, policy);
  const long long rhs = (ca.ind_q - cb.ind_q) + (ca.dim_pi_V - cb.dim_pi_V) -
                        (ca.dim_lV - cb.dim_lV);
  return {mu - mu_red, rhs};
}

IdentityReport section_4_3_identities(const ReductionSetup& setup,
                                      const LagrangianPath& path,
                                      const Lagrangian& l0,
                                      const ChartSegment& segment,
                                      const TolerancePolicy& policy) {
  if (!contains(segment.l1.sub, setup.w_perp, policy))
    throw DomainError("section_4_3_identities: chart complement must contain w_perp");

  Subspace v = intersect(l0.sub, setup.w, policy);
  IdentityReport rep;
  for (std::size_t i = 0; i < path.mesh.size(); ++i) {
    const double t = path.mesh[i];
    if (t < segment.t0 - 1e-12 || t > segment.t1 + 1e-12) continue;
    const Subspace& ell = path.frames[i];
    BilinForm q = chart(l0, segment.l1, ell, policy);

    Subspace ker_q = form_kernel(q, policy);
    if (!subspaces_equal(ker_q, intersect(ell, l0.sub, policy), policy))
      rep.kernel_identity = false;

    Subspace vperp = perp(q, v, policy);
    EForm ef = e_form_at(setup, ell, l0, policy);
    if (!subspaces_equal(vperp, ef.e, policy)) rep.perp_identity = false;

    if (ef.e.dim() > 0) {
      Matrix restricted = restrict(q, ef.e, policy).matrix();
      const double scale = std::max(1.0, std::max(restricted.max_abs(), ef.qmat.max_abs()));
      if ((restricted - ef.qmat).max_abs() > 1e-6 * scale) rep.form_identity = false;
    }
  }
  return rep;
}

}  // namespace sfm
