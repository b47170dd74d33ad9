#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sfm/scenarios.hpp"
#include "sfm/specflow.hpp"

using namespace sfm;

namespace {

FormPath scalar_path(std::vector<double> mesh, std::vector<double> values) {
  std::vector<SymMatrix> samples;
  for (double v : values) samples.push_back(SymMatrix::diag({v}));
  return FormPath(std::move(mesh), std::move(samples));
}

long long index_of(const SymMatrix& m, const TolerancePolicy& policy) {
  return index_nullity(BilinForm::on_full(m.mat(), Symmetry::symmetric), policy).index;
}

}  // namespace

TEST_CASE("flow of elementary one-dimensional paths") {
  TolerancePolicy policy;
  // one upward crossing
  CHECK(spectral_flow(scalar_path({-1.0, 1.0}, {-1.0, 1.0}), policy).flow == 1);
  // zero at the start counts on the nonnegative side
  CHECK(spectral_flow(scalar_path({0.0, 1.0}, {0.0, 1.0}), policy).flow == 0);
  // zero at the end subtracts nothing either
  CHECK(spectral_flow(scalar_path({0.0, 1.0}, {-1.0, 0.0}), policy).flow == 1);
  // constant path
  CHECK(spectral_flow(scalar_path({0.0, 1.0}, {2.0, 2.0}), policy).flow == 0);
}

TEST_CASE("opposite crossings cancel") {
  TolerancePolicy policy;
  std::vector<SymMatrix> samples{SymMatrix::diag({-1.0, 1.0}), SymMatrix::diag({1.0, -1.0})};
  FormPath p({-1.0, 1.0}, samples);
  CHECK(spectral_flow(p, policy).flow == 0);
}

TEST_CASE("certificate pieces cover the interval with positive margins") {
  TolerancePolicy policy;
  FormPath p = gen_form_path(Seed{5, 0}, 4, 6);
  auto cert = spectral_flow(p, policy);
  REQUIRE(!cert.pieces.empty());
  CHECK(cert.pieces.front().t0 == doctest::Approx(p.a()));
  CHECK(cert.pieces.back().t1 == doctest::Approx(p.b()));
  for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
    CHECK(cert.pieces[i].barrier > 0.0);
    CHECK(cert.pieces[i].margin > 0.0);
    if (i > 0) CHECK(cert.pieces[i].t0 == doctest::Approx(cert.pieces[i - 1].t1));
  }
}

TEST_CASE("flow equals the endpoint index difference and the sampling oracle") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    FormPath p = gen_form_path(Seed{29, trial}, 2 + int(trial % 5), 5 + int(trial % 4));
    const long long flow = spectral_flow(p, policy).flow;
    CHECK(flow == index_of(p.samples().front(), policy) - index_of(p.samples().back(), policy));
    CHECK(flow == spectral_flow_oracle(p, 150, policy));
  }
}

TEST_CASE("concatenation is additive and reversal negates") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    FormPath p = gen_form_path(Seed{31, trial}, 3, 7);
    auto [left, right] = split_at(p, 3);
    const long long f = spectral_flow(p, policy).flow;
    CHECK(f == spectral_flow(left, policy).flow + spectral_flow(right, policy).flow);
    CHECK(spectral_flow(concatenate(left, right), policy).flow == f);
    CHECK(spectral_flow(reverse(p), policy).flow == -f);
  }
}

TEST_CASE("direct sums add flows") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    FormPath p1 = gen_form_path(Seed{37, trial}, 2, 5);
    FormPath p2 = gen_form_path(Seed{41, trial}, 3, 6);
    CHECK(spectral_flow(direct_sum(p1, p2), policy).flow ==
          spectral_flow(p1, policy).flow + spectral_flow(p2, policy).flow);
  }
}

TEST_CASE("congruence by a constant invertible matrix preserves the flow") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    FormPath p = gen_form_path(Seed{43, trial}, 4, 5);
    Rng rng(Seed{47, trial});
    std::vector<Matrix> mpath(p.mesh().size(), well_conditioned_gl(rng, 4));
    CHECK(spectral_flow(conjugate(p, mpath, policy), policy).flow ==
          spectral_flow(p, policy).flow);
  }
}

TEST_CASE("invertible paths have zero flow") {
  TolerancePolicy policy;
  PathOptions opt;
  opt.invertible = true;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    FormPath p = gen_form_path(Seed{53, trial}, 3 + int(trial % 4), 6, opt);
    CHECK(spectral_flow(p, policy).flow == 0);
  }
}

TEST_CASE("restriction identity holds on random instances") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const int n = 3 + int(trial % 5);
    FormPath p = gen_form_path(Seed{59, trial}, n, 6);
    BilinForm qa = BilinForm::on_full(p.samples().front().mat(), Symmetry::symmetric);
    BilinForm qb = BilinForm::on_full(p.samples().back().mat(), Symmetry::symmetric);
    Subspace v = find_nondegenerate_subspace(qa, qb, Subspace::full(n), 1,
                                             Seed{61, trial}, policy);
    auto [lhs, rhs] = theorem1_sides(p, v, policy);
    CHECK(lhs == rhs);
    FormPath r = restrict_path(p, v, policy);
    CHECK(r.dim() == n - 1);
  }
}
