#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "sfm/reduction.hpp"

namespace sfm {

// Per-trial generator state is a pure function of (master, trial_index);
// parallel trials never share streams.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t trial_index = 0;
};

// Deterministic per-trial random stream.
class Rng {
 public:
  explicit Rng(Seed seed);
  double uniform(double lo, double hi);
  double gauss();
  int uniform_int(int lo, int hi);  // inclusive
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

Matrix gaussian_matrix(Rng& rng, int rows, int cols);
Matrix random_orthogonal(Rng& rng, int n);
// cond(M) <= ~4, deterministic in the stream.
Matrix well_conditioned_gl(Rng& rng, int n);
Subspace random_subspace(Rng& rng, int ambient, int dim);

enum class SignEntry { plus, minus, zero };

// Without a pattern: symmetrized Gaussian.  With one: M^T diag(pattern) M
// for well-conditioned M, so index/nullity are known by construction.
SymMatrix gen_symmetric(Seed seed, int n, const std::optional<std::vector<SignEntry>>& pattern = {});

struct PathOptions {
  bool closed = false;
  bool invertible = false;
  int constant_kernel_dim = 0;
  std::optional<std::vector<SignEntry>> endpoint_pattern_a;
  std::optional<std::vector<SignEntry>> endpoint_pattern_b;
};

FormPath gen_form_path(Seed seed, int n, int mesh_size, const PathOptions& options = {});

// Randomized search for a codim-`codim` subspace of `inside` on which both
// forms are non-degenerate (such subspaces are dense); bounded retries.
Subspace find_nondegenerate_subspace(const BilinForm& q1, const BilinForm& q2,
                                     const Subspace& inside, int codim, Seed seed,
                                     const TolerancePolicy& policy,
                                     int retry_budget = 1000);

// Uniform random Lagrangian of the standard R^{2n}.
Lagrangian random_lagrangian(Rng& rng, const SymplecticSpace& space);

// Random isotropic subspace of dimension k.
Subspace random_isotropic(Rng& rng, const SymplecticSpace& space, int k);

struct LagOptions {
  bool hit_L0 = false;               // some sample meets L0 nontrivially
  bool degenerate_endpoints = false; // chart form singular at t = a and t = b
  int mesh_size = 8;
};

struct LagScenario {
  SymplecticSpace space;
  ReductionSetup setup;
  Lagrangian l0;
  Lagrangian l1;  // chart complement used by the generator; contains w_perp
  LagrangianPath path;
};

// Admissible Theorem-2 instance: coisotropic w of codim k (k = 0 allowed),
// L0 and a Lagrangian path generated in a chart whose complement contains
// w_perp, so the path avoids w_perp by construction.
LagScenario gen_lagrangian_scenario(Seed seed, int n, int k, const LagOptions& options = {});

}  // namespace sfm
