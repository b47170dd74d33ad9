#include "sfm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(Seed seed)
    : eng_(splitmix(splitmix(seed.master) ^ splitmix(~seed.trial_index))) {}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(eng_);
}

double Rng::gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

int Rng::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(eng_);
}

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss();
  return m;
}

Matrix random_orthogonal(Rng& rng, int n) {
  // modified Gram-Schmidt with one re-orthogonalization pass
  Matrix g = gaussian_matrix(rng, n, n);
  Matrix q(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = g(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < j; ++p) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += q(i, p) * v[i];
        for (int i = 0; i < n; ++i) v[i] -= dot * q(i, p);
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) throw NumericError("random_orthogonal: degenerate draw");
    for (int i = 0; i < n; ++i) q(i, j) = v[i] / norm;
  }
  return q;
}

Matrix well_conditioned_gl(Rng& rng, int n) {
  Matrix o1 = random_orthogonal(rng, n);
  Matrix o2 = random_orthogonal(rng, n);
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = rng.uniform(0.7, 1.5);
  return o1 * d * o2;
}

Subspace random_subspace(Rng& rng, int ambient, int dim) {
  if (dim == 0) return Subspace::zero(ambient);
  TolerancePolicy policy;
  Subspace s = column_space(gaussian_matrix(rng, ambient, dim), policy);
  if (s.dim() != dim) throw NumericError("random_subspace: degenerate draw");
  return s;
}

SymMatrix gen_symmetric(Seed seed, int n,
                        const std::optional<std::vector<SignEntry>>& pattern) {
  Rng rng(seed);
  if (!pattern) return SymMatrix(gaussian_matrix(rng, n, n));
  if (int(pattern->size()) != n)
    throw DomainError("gen_symmetric: pattern length mismatch");
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    switch ((*pattern)[i]) {
      case SignEntry::plus: d(i, i) = 1.0; break;
      case SignEntry::minus: d(i, i) = -1.0; break;
      case SignEntry::zero: d(i, i) = 0.0; break;
    }
  }
  Matrix m = well_conditioned_gl(rng, n);
  return SymMatrix(m.transpose() * d * m);
}

namespace {

Matrix sym_from_pattern(Rng& rng, const std::vector<SignEntry>& pattern) {
  const int n = int(pattern.size());
  Matrix d(n, n);
  for (int i = 0; i < n; ++i)
    d(i, i) = pattern[i] == SignEntry::plus ? 1.0
              : pattern[i] == SignEntry::minus ? -1.0
                                               : 0.0;
  Matrix m = well_conditioned_gl(rng, n);
  return m.transpose() * d * m;
}

// Random walk of symmetric matrices with all |eigenvalues| >= 1 at samples
// and steps small enough that piecewise-linear interpolation stays
// invertible (Weyl bound: step norm < sample gap).
std::vector<Matrix> invertible_walk(Rng& rng, int n, int count) {
  std::vector<Matrix> out;
  if (n == 0) {
    out.assign(count, Matrix(0, 0));
    return out;
  }
  Matrix o = random_orthogonal(rng, n);
  Matrix d(n, n);
  for (int i = 0; i < n; ++i)
    d(i, i) = (rng.uniform_int(0, 1) ? 1.0 : -1.0) * rng.uniform(1.0, 2.0);
  Matrix cur = o * d * o.transpose();
  out.push_back(symmetrize(cur));
  for (int s = 1; s < count; ++s) {
    Matrix step = symmetrize(gaussian_matrix(rng, n, n));
    const double f = step.frob();
    if (f > 0.0) step *= 0.4 / std::max(f, 0.4);
    Matrix next = symmetrize(out.back() + step);
    auto e = eigh(SymMatrix(next));
    Matrix clamped(n, n);
    for (int k = 0; k < n; ++k) {
      const double lam = e.values[k];
      const double target = (lam >= 0.0 ? 1.0 : -1.0) * std::max(std::abs(lam), 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          clamped(i, j) += e.vectors(i, k) * target * e.vectors(j, k);
    }
    out.push_back(symmetrize(clamped));
  }
  return out;
}

}  // namespace

FormPath gen_form_path(Seed seed, int n, int mesh_size, const PathOptions& opt) {
  if (mesh_size < 2) throw DomainError("gen_form_path: need at least two samples");
  if (opt.invertible && opt.constant_kernel_dim > 0)
    throw DomainError("gen_form_path: invertible and constant_kernel_dim conflict");
  if (opt.constant_kernel_dim < 0 || opt.constant_kernel_dim > n)
    throw DomainError("gen_form_path: constant_kernel_dim out of range");
  if ((opt.constant_kernel_dim > 0 || opt.invertible) &&
      (opt.endpoint_pattern_a || opt.endpoint_pattern_b))
    throw DomainError("gen_form_path: endpoint patterns conflict with structural options");
  auto has_zero = [](const std::vector<SignEntry>& p) {
    return std::any_of(p.begin(), p.end(),
                       [](SignEntry e) { return e == SignEntry::zero; });
  };
  if (opt.invertible && ((opt.endpoint_pattern_a && has_zero(*opt.endpoint_pattern_a)) ||
                         (opt.endpoint_pattern_b && has_zero(*opt.endpoint_pattern_b))))
    throw DomainError("gen_form_path: invertible path cannot have degenerate endpoints");
  if (opt.closed && opt.endpoint_pattern_b &&
      (!opt.endpoint_pattern_a || *opt.endpoint_pattern_a != *opt.endpoint_pattern_b))
    throw DomainError("gen_form_path: closed path needs matching endpoint patterns");

  Rng rng(seed);
  const int m = mesh_size;  // number of samples
  std::vector<double> mesh(m);
  for (int i = 0; i < m; ++i) mesh[i] = double(i) / (m - 1);

  std::vector<Matrix> mats;
  const int r = opt.constant_kernel_dim;
  if (opt.invertible || r > 0) {
    const int inner = n - r;
    std::vector<Matrix> walk;
    if (opt.closed) {
      // out-and-back: forward half, then the same samples retraced
      std::vector<Matrix> fwd = invertible_walk(rng, inner, (m + 2) / 2);
      walk = fwd;
      for (int i = int(fwd.size()) - 2; int(walk.size()) < m; --i)
        walk.push_back(fwd[std::max(i, 0)]);
      walk[m - 1] = fwd.front();
    } else {
      walk = invertible_walk(rng, inner, m);
    }
    if (r == 0) {
      mats = std::move(walk);
    } else {
      Matrix rot = random_orthogonal(rng, n);
      for (const Matrix& c : walk) {
        Matrix blk(n, n);
        for (int i = 0; i < inner; ++i)
          for (int j = 0; j < inner; ++j) blk(r + i, r + j) = c(i, j);
        mats.push_back(rot.transpose() * blk * rot);
      }
    }
  } else {
    for (int i = 0; i < m; ++i) mats.push_back(symmetrize(gaussian_matrix(rng, n, n)));
    if (opt.endpoint_pattern_a) mats.front() = sym_from_pattern(rng, *opt.endpoint_pattern_a);
    if (opt.endpoint_pattern_b) mats.back() = sym_from_pattern(rng, *opt.endpoint_pattern_b);
    if (opt.closed) mats.back() = mats.front();
  }

  std::vector<SymMatrix> samples;
  samples.reserve(m);
  for (auto& x : mats) samples.emplace_back(x);
  return FormPath(std::move(mesh), std::move(samples));
}

Subspace find_nondegenerate_subspace(const BilinForm& q1, const BilinForm& q2,
                                     const Subspace& inside, int codim, Seed seed,
                                     const TolerancePolicy& policy, int retry_budget) {
  const int target = inside.dim() - codim;
  if (target < 0 || codim < 0)
    throw DomainError("find_nondegenerate_subspace: infeasible codimension");
  Rng rng(seed);
  int best_null1 = -1, best_null2 = -1;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    Subspace coords = random_subspace(rng, inside.dim(), target);
    Subspace w(inside.ambient_dim(), inside.lift(coords.frame()));
    const int null1 = kernel(restrict(q1, w, policy).matrix(), policy).dim();
    const int null2 = kernel(restrict(q2, w, policy).matrix(), policy).dim();
    if (null1 == 0 && null2 == 0) return w;
    if (best_null1 < 0 || null1 + null2 < best_null1 + best_null2) {
      best_null1 = null1;
      best_null2 = null2;
    }
  }
  throw SearchError("find_nondegenerate_subspace: budget of " +
                    std::to_string(retry_budget) +
                    " draws exhausted; smallest observed nullities " +
                    std::to_string(best_null1) + ", " + std::to_string(best_null2));
}

Lagrangian random_lagrangian(Rng& rng, const SymplecticSpace& space) {
  const int n = space.half_dim();
  {
    Matrix std_omega = standard_space(n).omega;
    if ((space.omega - std_omega).max_abs() > 1e-12)
      throw DomainError("random_lagrangian: requires the standard symplectic form");
  }
  // columns of a random unitary X + iY give a Lagrangian frame [X; Y]
  Matrix x = gaussian_matrix(rng, n, n);
  Matrix y = gaussian_matrix(rng, n, n);
  for (int j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < j; ++p) {
        double re = 0.0, im = 0.0;  // <z_p, z_j> with conjugate-linear first slot
        for (int i = 0; i < n; ++i) {
          re += x(i, p) * x(i, j) + y(i, p) * y(i, j);
          im += x(i, p) * y(i, j) - y(i, p) * x(i, j);
        }
        for (int i = 0; i < n; ++i) {
          const double xp = x(i, p), yp = y(i, p);
          x(i, j) -= re * xp - im * yp;
          y(i, j) -= re * yp + im * xp;
        }
      }
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += x(i, j) * x(i, j) + y(i, j) * y(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-8) throw NumericError("random_lagrangian: degenerate draw");
    for (int i = 0; i < n; ++i) {
      x(i, j) /= norm;
      y(i, j) /= norm;
    }
  }
  Matrix frame = vcat(x, y);
  TolerancePolicy policy;
  return make_lagrangian(space, Subspace(2 * n, frame), policy);
}

Subspace random_isotropic(Rng& rng, const SymplecticSpace& space, int k) {
  const int d = space.dim;
  if (k == 0) return Subspace::zero(d);
  if (2 * k > d) throw DomainError("random_isotropic: dimension too large");
  Matrix f(d, 0);
  for (int j = 0; j < k; ++j) {
    Matrix v = gaussian_matrix(rng, d, 1);
    if (j > 0) {
      Matrix b = hcat(f, space.omega * f);
      Matrix btb = b.transpose() * b;
      v = v - b * solve(btb, b.transpose() * v);
    }
    double norm = v.frob();
    if (norm < 1e-8) throw NumericError("random_isotropic: degenerate draw");
    v *= 1.0 / norm;
    f = hcat(f, v);
  }
  return Subspace(d, f);
}

LagScenario gen_lagrangian_scenario(Seed seed, int n, int k, const LagOptions& opt) {
  if (n < 1 || k < 0 || (k > 0 && k > n - 1))
    throw DomainError("gen_lagrangian_scenario: need 0 <= k <= n-1");
  const int mesh_size = std::max(opt.mesh_size, 4);
  TolerancePolicy policy;
  Rng rng(seed);
  SymplecticSpace space = standard_space(n);

  Subspace iso = random_isotropic(rng, space, k);
  Subspace w = k == 0 ? Subspace::full(2 * n)
                      : perp(space.form(), iso, policy);
  ReductionSetup setup = make_reduction(space, w, policy);

  Lagrangian l0 = random_lagrangian(rng, space);
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (k == 0 || (intersect(l0.sub, setup.w_perp, policy).dim() == 0 &&
                   transversality_margin(l0.sub, setup.w_perp) > 0.1))
      break;
    l0 = random_lagrangian(rng, space);
  }
  Lagrangian l1 = lagrangian_complement(
      l0, k > 0 ? std::optional<Subspace>(setup.w_perp) : std::nullopt, policy);

  // eigenvalue tracks of the chart form, piecewise linear on the mesh
  Matrix basis = random_orthogonal(rng, n);
  std::vector<std::vector<double>> tracks(n, std::vector<double>(mesh_size));
  for (int i = 0; i < n; ++i) {
    double cur = rng.uniform(-1.2, 1.2);
    for (int j = 0; j < mesh_size; ++j) {
      tracks[i][j] = cur;
      cur = std::clamp(cur + rng.uniform(-0.3, 0.3), -1.5, 1.5);
    }
  }
  if (opt.degenerate_endpoints) {
    tracks[0][0] = 0.0;
    tracks[n >= 2 ? 1 : 0][mesh_size - 1] = 0.0;
  }
  if (opt.hit_L0) {
    const int mid = mesh_size / 2;
    tracks[n >= 3 ? 2 : 0][mid] = 0.0;
  }

  std::vector<double> mesh(mesh_size);
  for (int j = 0; j < mesh_size; ++j) mesh[j] = double(j) / (mesh_size - 1);

  auto form_at = [basis, tracks, mesh, n](double t) {
    // linear interpolation of the eigenvalue tracks
    int seg = 0;
    while (seg + 2 < int(mesh.size()) && t > mesh[seg + 1]) ++seg;
    const double f = std::clamp((t - mesh[seg]) / (mesh[seg + 1] - mesh[seg]), 0.0, 1.0);
    Matrix d(n, n);
    for (int i = 0; i < n; ++i)
      d(i, i) = (1.0 - f) * tracks[i][seg] + f * tracks[i][seg + 1];
    return basis * d * basis.transpose();
  };
  auto sampler = [form_at, l0, l1, policy](double t) {
    return unchart(l0, l1, BilinForm(l0.sub, form_at(t), Symmetry::symmetric), policy).sub;
  };

  std::vector<Subspace> frames;
  frames.reserve(mesh_size);
  for (double t : mesh) frames.push_back(sampler(t));
  LagrangianPath path =
      make_lagrangian_path(space, mesh, std::move(frames), policy, 0.5, sampler);

  if (opt.hit_L0) {
    bool hit = false;
    for (const auto& fr : path.frames)
      if (intersect(fr, l0.sub, policy).dim() > 0) hit = true;
    if (!hit) throw NumericError("gen_lagrangian_scenario: hit_L0 option not realized");
  }
  return LagScenario{space, setup, l0, l1, std::move(path)};
}

}  // namespace sfm
