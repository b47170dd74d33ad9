#pragma once

#include <functional>
#include <optional>

#include "sfm/specflow.hpp"

namespace sfm {

// Even-dimensional real space with an invertible skew form.
struct SymplecticSpace {
  int dim = 0;   // 2n
  Matrix omega;  // dense skew matrix, strongly non-degenerate

  SymplecticSpace() = default;
  SymplecticSpace(int dim, Matrix omega_matrix);
  int half_dim() const { return dim / 2; }
  BilinForm form() const { return BilinForm::on_full(omega, Symmetry::skew); }
};

// R^{2n} with omega(e_i, e_{n+i}) = 1.
SymplecticSpace standard_space(int n);

struct Lagrangian {
  SymplecticSpace space;
  Subspace sub;  // dimension n, omega-isotropic
};

Lagrangian make_lagrangian(const SymplecticSpace& space, const Subspace& s,
                           const TolerancePolicy& policy);

bool is_lagrangian(const SymplecticSpace& space, const Subspace& s,
                   const TolerancePolicy& policy);

// Sampled continuous path of Lagrangians.  Consecutive samples must stay
// within max_step_angle of each other; an optional sampler provides exact
// values at new parameter values when a consumer needs to refine.
struct LagrangianPath {
  SymplecticSpace space;
  std::vector<double> mesh;
  std::vector<Subspace> frames;
  double max_step_angle = 0.5;
  std::function<Subspace(double)> sampler;  // optional

  double a() const { return mesh.front(); }
  double b() const { return mesh.back(); }
};

LagrangianPath make_lagrangian_path(const SymplecticSpace& space,
                                    std::vector<double> mesh,
                                    std::vector<Subspace> frames,
                                    const TolerancePolicy& policy,
                                    double max_step_angle = 0.5,
                                    std::function<Subspace(double)> sampler = {});

struct ChartSegment {
  double t0, t1;
  Lagrangian l0;
  Lagrangian l1;      // complementary to l0; every path sample transverse to it
  FormPath form_path; // chart forms on l0, in l0's frame coordinates
};

// Chart forms of every sample of the path with respect to (l0, l1);
// throws ChartError when some sample is not transverse to l1.
ChartSegment make_chart_segment(const LagrangianPath& path, const Lagrangian& l0,
                                const Lagrangian& l1, const TolerancePolicy& policy);

// A Lagrangian complement of l, optionally required to contain a given
// isotropic subspace that meets l trivially.
Lagrangian lagrangian_complement(const Lagrangian& l,
                                 const std::optional<Subspace>& must_contain,
                                 const TolerancePolicy& policy);

// Graph chart: l = graph of T : l0 -> l1, returned form is omega[T., .] on
// l0 in frame coordinates.  Throws ChartError when l is not transverse to l1.
BilinForm chart(const Lagrangian& l0, const Lagrangian& l1, const Subspace& l,
                const TolerancePolicy& policy);

// Inverse of chart: the graph Lagrangian of the symmetric form q.
Lagrangian unchart(const Lagrangian& l0, const Lagrangian& l1, const BilinForm& q,
                   const TolerancePolicy& policy);

// Smallest principal angle between l and cand (transversality margin).
double transversality_margin(const Subspace& l, const Subspace& cand);

// Maslov index via a greedy chart partition; the result is independent of
// the partition (tested against maslov_oracle).
long long maslov_index(const LagrangianPath& path, const Lagrangian& l0,
                       const TolerancePolicy& policy);

// Same quantity over a randomized chart partition, for differential tests.
long long maslov_oracle(const LagrangianPath& path, const Lagrangian& l0,
                        const TolerancePolicy& policy, unsigned long long seed = 0x5eedULL);

LagrangianPath reverse(const LagrangianPath& p);

}  // namespace sfm
