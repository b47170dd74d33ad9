#include "sfm/specflow.hpp"

#include <algorithm>
#include <cmath>

#include "sfm/errors.hpp"

namespace sfm {

FormPath::FormPath(std::vector<double> mesh, std::vector<SymMatrix> samples)
    : mesh_(std::move(mesh)), samples_(std::move(samples)) {
  if (mesh_.size() < 2 || mesh_.size() != samples_.size())
    throw DomainError("FormPath: mesh/sample mismatch");
  for (std::size_t i = 1; i < mesh_.size(); ++i)
    if (!(mesh_[i] > mesh_[i - 1]))
      throw DomainError("FormPath: mesh not strictly increasing");
  for (const auto& s : samples_)
    if (s.dim() != samples_.front().dim())
      throw DomainError("FormPath: sample dimension mismatch");
}

Matrix FormPath::at(double t) const {
  if (t <= mesh_.front()) return samples_.front().mat();
  if (t >= mesh_.back()) return samples_.back().mat();
  auto it = std::upper_bound(mesh_.begin(), mesh_.end(), t);
  const int i = int(it - mesh_.begin()) - 1;
  const double s = (t - mesh_[i]) / (mesh_[i + 1] - mesh_[i]);
  return (1.0 - s) * samples_[i].mat() + s * samples_[i + 1].mat();
}

bool FormPath::closed(const TolerancePolicy& policy) const {
  const double scale = std::max(max_norm(), 1.0);
  return (samples_.front().mat() - samples_.back().mat()).max_abs() <=
         policy.rank_tol * scale;
}

double FormPath::max_norm() const {
  double m = 0.0;
  for (const auto& s : samples_) {
    if (s.dim() == 0) continue;
    auto e = eigh(s);
    m = std::max(m, std::max(std::abs(e.values.front()), std::abs(e.values.back())));
  }
  return m;
}

namespace {

// #eigenvalues in [0, eps) under the zero-counts-nonnegative convention.
int count_band(const std::vector<double>& eigs, double theta, double eps) {
  int c = 0;
  for (double v : eigs)
    if (v >= -theta && v < eps) ++c;
  return c;
}

struct Certifier {
  const TolerancePolicy& policy;
  double theta;
  SfCertificate cert;

  void piece(double t0, double t1, const Matrix& a, const Matrix& b, int depth) {
    const std::vector<double> ea = eigh(a).values;
    const std::vector<double> eb = eigh(b).values;
    const double delta = (b - a).frob();

    double maxabs = 0.0;
    std::vector<double> pos{0.0};
    for (const std::vector<double>* e : {&ea, &eb}) {
      for (double v : *e) {
        maxabs = std::max(maxabs, std::abs(v));
        if (v > 0.0) pos.push_back(v);
      }
    }
    pos.push_back(maxabs + 1.0);
    std::sort(pos.begin(), pos.end());

    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
      if (pos[i + 1] - pos[i] > hi - lo) {
        lo = pos[i];
        hi = pos[i + 1];
      }
    }
    const double barrier = 0.5 * (lo + hi);
    double margin = hi - lo;  // an upper bound; tightened below
    for (const std::vector<double>* e : {&ea, &eb})
      for (double v : *e) margin = std::min(margin, std::abs(v - barrier));

    if (margin > 0.5 * delta && margin > 0.0) {
      cert.flow += count_band(eb, theta, barrier) - count_band(ea, theta, barrier);
      cert.pieces.push_back({t0, t1, barrier, margin});
      return;
    }
    if (depth >= policy.refine_limit)
      throw CertificationError("spectral_flow: no certifiable barrier on subinterval",
                               t0, t1);
    const Matrix mid = 0.5 * (a + b);
    const double tm = 0.5 * (t0 + t1);
    piece(t0, tm, a, mid, depth + 1);
    piece(tm, t1, mid, b, depth + 1);
  }
};

}  // namespace

SfCertificate spectral_flow(const FormPath& p, const TolerancePolicy& policy,
                            double scale_floor) {
  SfCertificate empty;
  if (p.dim() == 0) return empty;
  Certifier c{policy, policy.rank_tol * std::max(p.max_norm(), scale_floor), {}};
  const auto& mesh = p.mesh();
  for (int i = 0; i + 1 < int(mesh.size()); ++i) {
    c.piece(mesh[i], mesh[i + 1], p.samples()[i].mat(), p.samples()[i + 1].mat(), 0);
  }
  return c.cert;
}

long long spectral_flow_oracle(const FormPath& p, int samples_per_segment,
                               const TolerancePolicy& policy) {
  if (samples_per_segment < 100)
    throw DomainError("spectral_flow_oracle: need at least 100 samples per segment");
  const int n = p.dim();
  if (n == 0) return 0;
  const double norm = p.max_norm();
  const double theta = policy.rank_tol * norm;

  std::vector<double> prev = eigh(p.samples().front()).values;
  std::vector<bool> neg(n);
  for (int k = 0; k < n; ++k) neg[k] = prev[k] < -theta;

  long long flow = 0;
  const auto& mesh = p.mesh();
  for (int i = 0; i + 1 < int(mesh.size()); ++i) {
    const Matrix& a = p.samples()[i].mat();
    const Matrix& b = p.samples()[i + 1].mat();
    for (int s = 1; s <= samples_per_segment; ++s) {
      const double f = double(s) / samples_per_segment;
      std::vector<double> cur = eigh(SymMatrix((1.0 - f) * a + f * b)).values;

      // smallest gap between spectrally distinct neighbours; degenerate
      // clusters (width below 4*theta) do not count.
      double gmin = 0.0;
      for (int k = 0; k + 1 < n; ++k) {
        const double g = prev[k + 1] - prev[k];
        if (g > std::max(4.0 * theta, 1e-12 * norm) && (gmin == 0.0 || g < gmin))
          gmin = g;
      }
      for (int k = 0; k < n; ++k) {
        const bool now_neg = cur[k] < -theta;
        if (now_neg != neg[k]) {
          if (gmin > 0.0 && std::abs(cur[k] - prev[k]) > 0.5 * gmin)
            throw OracleInconclusive(
                "spectral_flow_oracle: track motion exceeds half the minimal gap");
          flow += now_neg ? -1 : 1;
          neg[k] = now_neg;
        }
      }
      prev = std::move(cur);
    }
  }
  return flow;
}

FormPath restrict_path(const FormPath& p, const Subspace& v, const TolerancePolicy& policy) {
  if (v.ambient_dim() != p.dim())
    throw DomainError("restrict_path: subspace ambient does not match path dimension");
  std::vector<SymMatrix> out;
  out.reserve(p.samples().size());
  for (const auto& s : p.samples()) {
    BilinForm q = BilinForm::on_full(s.mat(), Symmetry::symmetric);
    out.emplace_back(restrict(q, v, policy).matrix());
  }
  return FormPath(p.mesh(), std::move(out));
}

std::pair<long long, long long> theorem1_sides(const FormPath& p, const Subspace& v,
                                               const TolerancePolicy& policy) {
  const long long sf_full = spectral_flow(p, policy).flow;
  const long long sf_res =
      spectral_flow(restrict_path(p, v, policy), policy, p.max_norm()).flow;

  long long rhs = 0;
  int sign = 1;
  for (const SymMatrix* end : {&p.samples().front(), &p.samples().back()}) {
    BilinForm q = BilinForm::on_full(end->mat(), Symmetry::symmetric);
    Subspace vperp = perp(q, v, policy);
    const long long ind = index_nullity(restrict(q, vperp, policy), policy).index;
    const long long dim_vvp = intersect(v, vperp, policy).dim();
    const long long dim_vker = intersect(v, form_kernel(q, policy), policy).dim();
    rhs += sign * (ind + dim_vvp - dim_vker);
    sign = -sign;
  }
  return {sf_full - sf_res, rhs};
}

FormPath concatenate(const FormPath& p1, const FormPath& p2) {
  const double scale = std::max({p1.max_norm(), p2.max_norm(), 1.0});
  if ((p1.samples().back().mat() - p2.samples().front().mat()).max_abs() >
      1e-9 * scale)
    throw DomainError("concatenate: endpoint samples do not agree");
  std::vector<double> mesh = p1.mesh();
  std::vector<SymMatrix> samples = p1.samples();
  const double shift = p1.b() - p2.a();
  for (std::size_t i = 1; i < p2.mesh().size(); ++i) {
    mesh.push_back(p2.mesh()[i] + shift);
    samples.push_back(p2.samples()[i]);
  }
  return FormPath(std::move(mesh), std::move(samples));
}

std::pair<FormPath, FormPath> split_at(const FormPath& p, int mesh_index) {
  if (mesh_index <= 0 || mesh_index + 1 >= int(p.mesh().size()))
    throw DomainError("split_at: index not interior");
  std::vector<double> m1(p.mesh().begin(), p.mesh().begin() + mesh_index + 1);
  std::vector<SymMatrix> s1(p.samples().begin(), p.samples().begin() + mesh_index + 1);
  std::vector<double> m2(p.mesh().begin() + mesh_index, p.mesh().end());
  std::vector<SymMatrix> s2(p.samples().begin() + mesh_index, p.samples().end());
  return {FormPath(std::move(m1), std::move(s1)), FormPath(std::move(m2), std::move(s2))};
}

FormPath direct_sum(const FormPath& p1, const FormPath& p2) {
  if (std::abs(p1.a() - p2.a()) > 1e-12 || std::abs(p1.b() - p2.b()) > 1e-12)
    throw DomainError("direct_sum: parameter intervals differ");
  std::vector<double> mesh;
  {
    std::vector<double> all = p1.mesh();
    all.insert(all.end(), p2.mesh().begin(), p2.mesh().end());
    std::sort(all.begin(), all.end());
    for (double t : all)
      if (mesh.empty() || t - mesh.back() > 1e-12) mesh.push_back(t);
  }
  const int n1 = p1.dim(), n2 = p2.dim();
  std::vector<SymMatrix> samples;
  samples.reserve(mesh.size());
  for (double t : mesh) {
    Matrix a = p1.at(t), b = p2.at(t);
    Matrix blk(n1 + n2, n1 + n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n1; ++j) blk(i, j) = a(i, j);
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j) blk(n1 + i, n1 + j) = b(i, j);
    samples.emplace_back(blk);
  }
  return FormPath(std::move(mesh), std::move(samples));
}

FormPath conjugate(const FormPath& p, const std::vector<Matrix>& mpath,
                   const TolerancePolicy& policy) {
  if (mpath.size() != p.samples().size())
    throw DomainError("conjugate: conjugating path length mismatch");
  std::vector<SymMatrix> out;
  out.reserve(mpath.size());
  for (std::size_t i = 0; i < mpath.size(); ++i) {
    const Matrix& m = mpath[i];
    if (m.rows() != p.dim() || m.cols() != p.dim())
      throw DomainError("conjugate: matrix dimension mismatch");
    auto s = svd(m);
    if (s.sigma.empty() || s.sigma.back() <= policy.rank_tol)
      throw DomainError("conjugate: near-singular conjugating matrix");
    out.emplace_back(m.transpose() * p.samples()[i].mat() * m);
  }
  return FormPath(p.mesh(), std::move(out));
}

FormPath reverse(const FormPath& p) {
  const double a = p.a(), b = p.b();
  std::vector<double> mesh;
  std::vector<SymMatrix> samples;
  for (int i = int(p.mesh().size()) - 1; i >= 0; --i) {
    mesh.push_back(a + b - p.mesh()[i]);
    samples.push_back(p.samples()[i]);
  }
  return FormPath(std::move(mesh), std::move(samples));
}

}  // namespace sfm
