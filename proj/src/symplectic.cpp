#include "sfm/symplectic.hpp"

#include <cmath>
#include <random>

#include "sfm/errors.hpp"

namespace sfm {

namespace {

Matrix antisymmetrize(const Matrix& m) {
  Matrix r = m;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) = 0.5 * (m(i, j) - m(j, i));
  return r;
}

// Orthogonal complex structure from the polar decomposition omega = J*P.
Matrix compatible_structure(const Matrix& omega) {
  const int d = omega.rows();
  auto e = eigh(SymMatrix(omega.transpose() * omega));
  Matrix pinv(d, d);
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(e.values[k], 0.0);
    if (lam <= 0.0) throw NumericError("compatible_structure: omega is singular");
    const double inv = 1.0 / std::sqrt(lam);  // P^{-1} eigenvalue, P = (omega^T omega)^{1/2}
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        pinv(i, j) += e.vectors(i, k) * inv * e.vectors(j, k);
  }
  return omega * pinv;
}

}  // namespace

SymplecticSpace::SymplecticSpace(int dim, Matrix omega_matrix) : dim(dim) {
  if (dim <= 0 || dim % 2 != 0) throw DomainError("SymplecticSpace: dim must be even and positive");
  if (omega_matrix.rows() != dim || omega_matrix.cols() != dim)
    throw DomainError("SymplecticSpace: omega shape");
  Matrix skew = antisymmetrize(omega_matrix);
  if ((omega_matrix - skew).max_abs() > 1e-9 * std::max(1.0, omega_matrix.max_abs()))
    throw DomainError("SymplecticSpace: omega not skew");
  auto s = svd(skew);
  if (s.sigma.back() <= 1e-9 * s.sigma.front())
    throw DomainError("SymplecticSpace: omega not strongly non-degenerate");
  omega = std::move(skew);
}

SymplecticSpace standard_space(int n) {
  if (n < 1) throw DomainError("standard_space: n must be >= 1");
  Matrix o(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    o(i, n + i) = 1.0;
    o(n + i, i) = -1.0;
  }
  return SymplecticSpace(2 * n, std::move(o));
}

bool is_lagrangian(const SymplecticSpace& space, const Subspace& s,
                   const TolerancePolicy& policy) {
  if (s.ambient_dim() != space.dim || s.dim() != space.half_dim()) return false;
  Matrix r = s.frame().transpose() * space.omega * s.frame();
  return r.max_abs() <= policy.rank_tol * std::max(1.0, space.omega.max_abs());
}

Lagrangian make_lagrangian(const SymplecticSpace& space, const Subspace& s,
                           const TolerancePolicy& policy) {
  if (!is_lagrangian(space, s, policy))
    throw DomainError("make_lagrangian: subspace is not Lagrangian");
  return Lagrangian{space, s};
}

LagrangianPath make_lagrangian_path(const SymplecticSpace& space,
                                    std::vector<double> mesh,
                                    std::vector<Subspace> frames,
                                    const TolerancePolicy& policy,
                                    double max_step_angle,
                                    std::function<Subspace(double)> sampler) {
  if (mesh.size() != frames.size() || mesh.size() < 2)
    throw DomainError("LagrangianPath: mesh/sample mismatch");
  for (const auto& f : frames)
    if (!is_lagrangian(space, f, policy))
      throw DomainError("LagrangianPath: sample is not Lagrangian");

  for (int round = 0; round <= policy.refine_limit; ++round) {
    bool ok = true;
    for (std::size_t i = 0; i + 1 < frames.size() && ok; ++i)
      if (frames[i].max_angle_to(frames[i + 1]) > max_step_angle) ok = false;
    if (ok) break;
    if (!sampler || round == policy.refine_limit)
      throw DomainError("LagrangianPath: continuity bound violated and no sampler");
    std::vector<double> nm;
    std::vector<Subspace> nf;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
      nm.push_back(mesh[i]);
      nf.push_back(frames[i]);
      if (frames[i].max_angle_to(frames[i + 1]) > max_step_angle) {
        const double tm = 0.5 * (mesh[i] + mesh[i + 1]);
        Subspace mid = sampler(tm);
        if (!is_lagrangian(space, mid, policy))
          throw DomainError("LagrangianPath: sampler returned non-Lagrangian value");
        nm.push_back(tm);
        nf.push_back(mid);
      }
    }
    nm.push_back(mesh.back());
    nf.push_back(frames.back());
    mesh = std::move(nm);
    frames = std::move(nf);
  }
  return LagrangianPath{space, std::move(mesh), std::move(frames), max_step_angle,
                        std::move(sampler)};
}

double transversality_margin(const Subspace& l, const Subspace& cand) {
  if (l.dim() == 0 || cand.dim() == 0) return M_PI / 2;
  auto s = svd(l.frame().transpose() * cand.frame());
  return std::acos(std::clamp(s.sigma.front(), 0.0, 1.0));
}

Lagrangian lagrangian_complement(const Lagrangian& l,
                                 const std::optional<Subspace>& must_contain,
                                 const TolerancePolicy& policy) {
  const SymplecticSpace& sp = l.space;
  const int two_n = sp.dim;

  auto finish = [&](const Subspace& cand) {
    if (!is_lagrangian(sp, cand, policy) ||
        intersect(cand, l.sub, policy).dim() != 0 ||
        (must_contain && !contains(cand, *must_contain, policy)))
      throw NumericError("lagrangian_complement: constructed complement failed checks");
    return Lagrangian{sp, cand};
  };

  if (!must_contain || must_contain->dim() == 0) {
    Matrix j = compatible_structure(sp.omega);
    return finish(column_space(j * l.sub.frame(), policy));
  }

  const Subspace& c = *must_contain;
  Matrix iso = c.frame().transpose() * sp.omega * c.frame();
  if (iso.max_abs() > policy.rank_tol * std::max(1.0, sp.omega.max_abs()))
    throw DomainError("lagrangian_complement: constraint subspace is not isotropic");
  if (intersect(c, l.sub, policy).dim() != 0)
    throw DomainError("lagrangian_complement: constraint subspace meets the Lagrangian");
  const int m = c.dim();

  // Reduce by the coisotropic c^{perp_omega}; the complement is lifted from
  // a complement of the reduced image of l.
  BilinForm omega_form = sp.form();
  Subspace wc = perp(omega_form, c, policy);
  // orthonormal complement of c inside wc
  Matrix resid = wc.frame() - c.frame() * (c.frame().transpose() * wc.frame());
  Subspace r = column_space(resid, policy);
  if (r.dim() != two_n - 2 * m)
    throw NumericError("lagrangian_complement: unexpected reduced dimension");

  Matrix cand_frame = c.frame();
  if (r.dim() > 0) {
    Matrix omega_red = r.frame().transpose() * sp.omega * r.frame();
    Subspace s_int = intersect(l.sub, wc, policy);
    Subspace l_red = column_space(r.frame().transpose() * s_int.frame(), policy);
    Matrix j_red = compatible_structure(omega_red);
    Subspace comp_red = column_space(j_red * l_red.frame(), policy);
    cand_frame = hcat(cand_frame, r.frame() * comp_red.frame());
  }
  return finish(column_space(cand_frame, policy));
}

BilinForm chart(const Lagrangian& l0, const Lagrangian& l1, const Subspace& l,
                const TolerancePolicy& policy) {
  const int n = l0.space.half_dim();
  Matrix basis = hcat(l0.sub.frame(), l1.sub.frame());
  Matrix coef = solve(basis, l.frame());
  Matrix a = coef.block(0, 0, n, n);
  Matrix b = coef.block(n, 0, n, n);
  auto sa = svd(a);
  if (sa.sigma.empty() || sa.sigma.back() <= policy.angle_tol)
    throw ChartError("chart: Lagrangian not transverse to the chart complement");
  // graph map T = b a^{-1} in frame coordinates
  Matrix tau = solve(a.transpose(), b.transpose()).transpose();
  Matrix g = l1.sub.frame().transpose() * l0.space.omega * l0.sub.frame();
  Matrix m = tau.transpose() * g;
  if ((m - m.transpose()).max_abs() > 1e-5 * std::max(1.0, m.max_abs()))
    throw NumericError("chart: graph form is not symmetric to working precision");
  return BilinForm(l0.sub, symmetrize(m), Symmetry::symmetric);
}

Lagrangian unchart(const Lagrangian& l0, const Lagrangian& l1, const BilinForm& q,
                   const TolerancePolicy& policy) {
  if (q.symmetry() != Symmetry::symmetric)
    throw DomainError("unchart: form must be symmetric");
  Matrix g = l1.sub.frame().transpose() * l0.space.omega * l0.sub.frame();
  Matrix tau = solve(g.transpose(), q.matrix());
  Matrix graph = l0.sub.frame() + l1.sub.frame() * tau;
  Subspace s = column_space(graph, policy);
  return make_lagrangian(l0.space, s, policy);
}

ChartSegment make_chart_segment(const LagrangianPath& path, const Lagrangian& l0,
                                const Lagrangian& l1, const TolerancePolicy& policy) {
  std::vector<SymMatrix> forms;
  forms.reserve(path.frames.size());
  for (const auto& f : path.frames)
    forms.emplace_back(chart(l0, l1, f, policy).matrix());
  return ChartSegment{path.a(), path.b(), l0, l1, FormPath(path.mesh, std::move(forms))};
}

namespace {

// Random Lagrangian transverse to l0: a graph over the canonical complement.
Lagrangian random_transverse_complement(const Lagrangian& l0, const Lagrangian& base,
                                        std::mt19937_64& rng,
                                        const TolerancePolicy& policy) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> scale_pick(-2, 2);
  const int n = l0.space.half_dim();
  const double scale = std::pow(2.0, scale_pick(rng));
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = scale * gauss(rng);
  // graph over base with "vertical" l0: always transverse to l0
  return unchart(Lagrangian{l0.space, base.sub}, l0, BilinForm(base.sub, s, Symmetry::symmetric),
                 policy);
}

struct ChartCover {
  const LagrangianPath& path;
  const Lagrangian& l0;
  const TolerancePolicy& policy;
  std::mt19937_64 rng;
  bool randomized_only;
  int max_extra = -1;  // randomized cap on segment length, <0 = unlimited

  struct Pt {
    double t;
    Subspace f;
    Matrix q;  // chart form of f with respect to (l0, current complement)
  };

  Pt point_at(double t, const Subspace& f, const Lagrangian& l1) {
    return {t, f, chart(l0, l1, f, policy).matrix()};
  }

  long long run() {
    const int last = int(path.mesh.size()) - 1;
    Lagrangian base = lagrangian_complement(l0, std::nullopt, policy);
    long long flow = 0;
    int i = 0;
    std::uniform_int_distribution<int> cap_pick(0, 2);
    while (i < last) {
      // a complement is only accepted once the whole segment certifies:
      // transversality at every (refined) sample, with steps small against
      // the margins so the path cannot slip across the complement unseen
      long long seg_flow = 0;
      int seg_end = -1;
      for (int attempt = 0; attempt < 240 && seg_end < 0; ++attempt) {
        const double thr =
            std::max(0.05 * std::pow(10.0, -attempt / 30.0), policy.angle_tol);
        Lagrangian cand = (attempt == 0 && !randomized_only)
                              ? base
                              : random_transverse_complement(l0, base, rng, policy);
        if (transversality_margin(path.frames[i], cand.sub) < thr ||
            transversality_margin(path.frames[i + 1], cand.sub) < thr)
          continue;
        int j = i + 1;
        const int cap = max_extra >= 0 ? cap_pick(rng) : -1;
        while (j < last && (cap < 0 || j - i - 1 < cap) &&
               transversality_margin(path.frames[j + 1], cand.sub) >= thr)
          ++j;
        try {
          seg_flow = segment_flow(i, j, cand);
          seg_end = j;
        } catch (const ChartCoverError&) {
        } catch (const ChartError&) {
        }
      }
      if (seg_end < 0)
        throw ChartCoverError("maslov: no admissible chart complement found");
      flow += seg_flow;
      i = seg_end;
    }
    return flow;
  }

  long long segment_flow(int i, int j, const Lagrangian& l1) {
    std::vector<Pt> pts;
    pts.push_back(point_at(path.mesh[i], path.frames[i], l1));
    for (int k = i; k < j; ++k)
      refine(pts.back(), point_at(path.mesh[k + 1], path.frames[k + 1], l1), l1, 0, pts);
    std::vector<double> mesh;
    std::vector<SymMatrix> forms;
    mesh.reserve(pts.size());
    forms.reserve(pts.size());
    for (auto& p : pts) {
      mesh.push_back(p.t);
      forms.emplace_back(std::move(p.q));
    }
    // chart forms live at the scale of omega (frames are orthonormal), so a
    // nearly-constant segment must not read its own noise as signal
    return spectral_flow(FormPath(std::move(mesh), std::move(forms)), policy,
                         spectral_norm(path.space.omega))
        .flow;
  }

  // Appends rpt (and any needed interior samples) so that every step is
  // small relative to the transversality margins at its ends.
  void refine(const Pt& lpt, const Pt& rpt, const Lagrangian& l1, int depth,
              std::vector<Pt>& out) {
    const double ml = transversality_margin(lpt.f, l1.sub);
    const double mr = transversality_margin(rpt.f, l1.sub);
    const double d = std::max(lpt.f.max_angle_to(rpt.f), rpt.f.max_angle_to(lpt.f));
    // Two hazards can hide between samples whose endpoint data look tame:
    // a fast swing towards the complement that returns near its start, and
    // a pass straight through it, which barely moves the subspace but
    // sends a chart eigenvalue through infinity and flips its sign.  The
    // first is bounded by demanding steps small against the margins (plus
    // a minimum density when a sampler can supply interior points); the
    // second is caught in form space: across an admissible step the chart
    // form must move by less than its own size allows.
    const double onorm = spectral_norm(path.space.omega);
    const double form_gap = spectral_norm(rpt.q - lpt.q);
    const double form_cap =
        0.5 * (onorm + std::min(spectral_norm(lpt.q), spectral_norm(rpt.q)));
    if (d <= 0.45 * std::min(ml, mr) && form_gap <= form_cap &&
        (!path.sampler || (d <= 0.12 && depth >= 3))) {
      out.push_back(rpt);
      return;
    }
    if (!path.sampler || depth >= policy.refine_limit)
      throw ChartCoverError(
          "maslov: cannot certify the chart segment between samples");
    const double tm = 0.5 * (lpt.t + rpt.t);
    Subspace fm = path.sampler(tm);
    if (transversality_margin(fm, l1.sub) < policy.angle_tol)
      throw ChartCoverError("maslov: path crosses the chart complement");
    Pt mid = point_at(tm, std::move(fm), l1);
    refine(lpt, mid, l1, depth + 1, out);
    refine(mid, rpt, l1, depth + 1, out);
  }
};

}  // namespace

long long maslov_index(const LagrangianPath& path, const Lagrangian& l0,
                       const TolerancePolicy& policy) {
  ChartCover cover{path, l0, policy, std::mt19937_64(0x9e3779b97f4a7c15ULL), false, -1};
  return cover.run();
}

long long maslov_oracle(const LagrangianPath& path, const Lagrangian& l0,
                        const TolerancePolicy& policy, unsigned long long seed) {
  ChartCover cover{path, l0, policy, std::mt19937_64(seed), true, 2};
  return cover.run();
}

LagrangianPath reverse(const LagrangianPath& p) {
  LagrangianPath r;
  r.space = p.space;
  r.max_step_angle = p.max_step_angle;
  const double a = p.a(), b = p.b();
  for (int i = int(p.mesh.size()) - 1; i >= 0; --i) {
    r.mesh.push_back(a + b - p.mesh[i]);
    r.frames.push_back(p.frames[i]);
  }
  if (p.sampler) {
    auto s = p.sampler;
    r.sampler = [s, a, b](double t) { return s(a + b - t); };
  }
  return r;
}

}  // namespace sfm
