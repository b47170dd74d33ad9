#pragma once

#include "sfm/symplectic.hpp"

namespace sfm {

// Coisotropic reduction data: w with its omega-perp, the reduced symplectic
// space in concrete coordinates, and the quotient map.  Reduced coordinates
// are an orthonormal complement of w_perp inside w, so the quotient
// property is tested rather than assumed.
struct ReductionSetup {
  SymplecticSpace space;    // (R^{2n}, omega)
  Subspace w;               // coisotropic, codim k
  Subspace w_perp;          // omega-perp of w; isotropic, contained in w
  Subspace reduced_coords;  // orthonormal complement of w_perp inside w
  SymplecticSpace reduced;  // dim 2n - 2k with the induced form

  int codim() const { return space.dim - w.dim(); }
  // Coordinates in the reduced space of ambient vectors lying in w
  // (projection along w_perp followed by coordinate read-off).
  Matrix q_map(const Matrix& ambient_vectors) const {
    return reduced_coords.frame().transpose() * ambient_vectors;
  }
};

ReductionSetup make_reduction(const SymplecticSpace& space, const Subspace& w,
                              const TolerancePolicy& policy);

// lambda(l) = q(l n w); requires l n w_perp = {0}.
Lagrangian reduce_lagrangian(const ReductionSetup& setup, const Lagrangian& l,
                             const TolerancePolicy& policy);

LagrangianPath reduce_path(const ReductionSetup& setup, const LagrangianPath& path,
                           const TolerancePolicy& policy);

// Endpoint quantities of the Maslov reduction identity, with
// V = l0 n w and pi the projection of l0 + w_perp onto l0 along w_perp.
struct CorrectionTerms {
  long long ind_q = 0;     // ind of the form on E_t
  long long dim_pi_V = 0;  // dim pi(l(t) n (V + w_perp))
  long long dim_lV = 0;    // dim(l(t) n V)
  long long e_dim = 0;     // dim E_t = dim pi(l(t) n (l0 + w_perp))
};

enum class PathEnd { a, b };

CorrectionTerms correction_terms(const ReductionSetup& setup, const LagrangianPath& path,
                                 const Lagrangian& l0, PathEnd t_end,
                                 const TolerancePolicy& policy);

// lhs = mu(l, L0) - mu(reduced l, reduced L0); rhs from the endpoint
// correction terms.  Exact integers.
std::pair<long long, long long> theorem2_sides(const ReductionSetup& setup,
                                               const LagrangianPath& path,
                                               const Lagrangian& l0,
                                               const TolerancePolicy& policy);

struct IdentityReport {
  bool kernel_identity = true;   // ker Q_t = l(t) n L0
  bool perp_identity = true;     // V^{perp_Qt} = pi(l(t) n (L0 + w_perp))
  bool form_identity = true;     // Q_t|_{V^perp_Qt} = q_t
  bool all() const { return kernel_identity && perp_identity && form_identity; }
};

// Checks the three chart-level identities at every sample of the segment.
// The segment chart complement must contain w_perp.
IdentityReport section_4_3_identities(const ReductionSetup& setup,
                                      const LagrangianPath& path,
                                      const Lagrangian& l0,
                                      const ChartSegment& segment,
                                      const TolerancePolicy& policy);

}  // namespace sfm
