#pragma once

#include <vector>

#include "sfm/quadform.hpp"

namespace sfm {

// A continuous path of symmetric forms, piecewise-linear in the matrix
// entries over a strictly increasing mesh.
class FormPath {
 public:
  FormPath() = default;
  FormPath(std::vector<double> mesh, std::vector<SymMatrix> samples);

  int dim() const { return samples_.empty() ? 0 : samples_.front().dim(); }
  int segments() const { return int(mesh_.size()) - 1; }
  const std::vector<double>& mesh() const { return mesh_; }
  const std::vector<SymMatrix>& samples() const { return samples_; }
  double a() const { return mesh_.front(); }
  double b() const { return mesh_.back(); }

  Matrix at(double t) const;  // linear interpolation
  bool closed(const TolerancePolicy& policy) const;
  double max_norm() const;  // max spectral norm over samples

 private:
  std::vector<double> mesh_;
  std::vector<SymMatrix> samples_;
};

// Certificate accompanying a computed spectral flow: per refined
// subinterval, a positive barrier and the certified Weyl margin around it.
struct SfCertificate {
  struct Piece {
    double t0, t1;
    double barrier;
    double margin;
  };
  std::vector<Piece> pieces;
  long long flow = 0;
};

// Certified spectral flow of a piecewise-linear path.  Convention:
// eigenvalues exactly at 0 count on the nonnegative side, so the flow of
// any finite-dimensional path equals ind Q_a - ind Q_b.  scale_floor is an
// external norm for the zero-band threshold (see kernel()); needed when p
// is the restriction of a larger path to a nearly-null subspace.
SfCertificate spectral_flow(const FormPath& p, const TolerancePolicy& policy,
                            double scale_floor = 0.0);

// Dense-sampling heuristic used only as an independent cross-check.
long long spectral_flow_oracle(const FormPath& p, int samples_per_segment,
                               const TolerancePolicy& policy = {});

FormPath restrict_path(const FormPath& p, const Subspace& v, const TolerancePolicy& policy);

// Both sides of the spectral-flow restriction identity:
//   lhs = sf(Q) - sf(Q|_V)
//   rhs = ind Qa|_{V^perpQa} - ind Qb|_{V^perpQb}
//       + dim(V n V^perpQa) - dim(V n V^perpQb)
//       - dim(V n ker Qa) + dim(V n ker Qb)
std::pair<long long, long long> theorem1_sides(const FormPath& p, const Subspace& v,
                                               const TolerancePolicy& policy);

// p2 is shifted so it starts at p1's end; endpoint samples must agree.
FormPath concatenate(const FormPath& p1, const FormPath& p2);

// Split at an interior mesh point.
std::pair<FormPath, FormPath> split_at(const FormPath& p, int mesh_index);

// Block-diagonal direct sum; paths are resampled onto the common mesh.
FormPath direct_sum(const FormPath& p1, const FormPath& p2);

// Samplewise congruence M_t^T Q_t M_t; every M_t must be invertible.
FormPath conjugate(const FormPath& p, const std::vector<Matrix>& mpath,
                   const TolerancePolicy& policy);

FormPath reverse(const FormPath& p);

}  // namespace sfm
