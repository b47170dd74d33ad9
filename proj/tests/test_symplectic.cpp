#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfm/errors.hpp"
#include "sfm/scenarios.hpp"
#include "sfm/symplectic.hpp"

using namespace sfm;

namespace {

Subspace line(double angle) {
  Matrix f(2, 1);
  f(0, 0) = std::cos(angle);
  f(1, 0) = std::sin(angle);
  return Subspace(2, f);
}

LagrangianPath rotating_path(const SymplecticSpace& space, double a, double b, int steps) {
  TolerancePolicy policy;
  std::vector<double> mesh;
  std::vector<Subspace> frames;
  for (int i = 0; i <= steps; ++i) {
    const double t = a + (b - a) * i / steps;
    mesh.push_back(t);
    frames.push_back(line(t));
  }
  return make_lagrangian_path(space, std::move(mesh), std::move(frames), policy, 0.5,
                              [](double t) { return line(t); });
}

}  // namespace

TEST_CASE("the standard space pairs e_i with e_{n+i}") {
  SymplecticSpace sp = standard_space(2);
  CHECK(sp.dim == 4);
  CHECK(sp.omega(0, 2) == doctest::Approx(1.0));
  CHECK(sp.omega(1, 3) == doctest::Approx(1.0));
  CHECK(sp.omega(2, 0) == doctest::Approx(-1.0));
  CHECK((sp.omega + sp.omega.transpose()).max_abs() == doctest::Approx(0.0));
}

TEST_CASE("lagrangian validation") {
  TolerancePolicy policy;
  SymplecticSpace sp = standard_space(2);
  Matrix f(4, 2);
  f(0, 0) = 1.0;
  f(1, 1) = 1.0;  // span(e1, e2): isotropic, dimension 2
  CHECK(is_lagrangian(sp, Subspace(4, f), policy));
  Matrix g(4, 2);
  g(0, 0) = 1.0;
  g(2, 1) = 1.0;  // span(e1, e3): omega(e1, e3) = 1, not isotropic
  CHECK(!is_lagrangian(sp, Subspace(4, g), policy));
  CHECK_THROWS_AS(make_lagrangian(sp, Subspace(4, g), policy), DomainError);
}

TEST_CASE("chart of a rotating line is minus tangent") {
  TolerancePolicy policy;
  SymplecticSpace sp = standard_space(1);
  Lagrangian l0 = make_lagrangian(sp, line(0.0), policy);
  Lagrangian l1 = make_lagrangian(sp, line(std::acos(-1.0) / 2), policy);
  for (double t : {-0.8, -0.3, 0.0, 0.4, 1.1}) {
    BilinForm q = chart(l0, l1, line(t), policy);
    REQUIRE(q.dim() == 1);
    // frame of l0 may be e1 or -e1; the quadratic value is sign-invariant
    CHECK(q.matrix()(0, 0) == doctest::Approx(-std::tan(t)).epsilon(1e-9));
    // round trip
    CHECK(subspaces_equal(unchart(l0, l1, q, policy).sub, line(t), policy));
  }
  // l = l1 is not in the chart domain
  CHECK_THROWS_AS(chart(l0, l1, l1.sub, policy), ChartError);
}

TEST_CASE("unchart always produces a lagrangian") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(Seed{67, trial});
    const int n = 1 + int(trial % 4);
    SymplecticSpace sp = standard_space(n);
    Lagrangian l0 = random_lagrangian(rng, sp);
    Lagrangian l1 = lagrangian_complement(l0, std::nullopt, policy);
    CHECK(intersect(l0.sub, l1.sub, policy).dim() == 0);
    SymMatrix q = gen_symmetric(Seed{71, trial}, n);
    Lagrangian l = unchart(l0, l1, BilinForm(l0.sub, q.mat(), Symmetry::symmetric), policy);
    CHECK(is_lagrangian(sp, l.sub, policy));
    BilinForm back = chart(l0, l1, l.sub, policy);
    CHECK((back.matrix() - q.mat()).max_abs() < 1e-8 * std::max(1.0, q.mat().max_abs()));
  }
}

TEST_CASE("lagrangian_complement honors a required isotropic subspace") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    Rng rng(Seed{73, trial});
    SymplecticSpace sp = standard_space(3);
    Lagrangian l0 = random_lagrangian(rng, sp);
    Subspace iso = random_isotropic(rng, sp, 2);
    if (intersect(l0.sub, iso, policy).dim() != 0) continue;
    Lagrangian l1 = lagrangian_complement(l0, iso, policy);
    CHECK(is_lagrangian(sp, l1.sub, policy));
    CHECK(intersect(l0.sub, l1.sub, policy).dim() == 0);
    CHECK(contains(l1.sub, iso, policy));
  }
}

TEST_CASE("constant and transverse paths have index zero") {
  TolerancePolicy policy;
  SymplecticSpace sp = standard_space(1);
  Lagrangian l0 = make_lagrangian(sp, line(0.0), policy);
  // constant
  LagrangianPath c = rotating_path(sp, 0.7, 0.7 + 1e-9, 4);
  CHECK(maslov_index(c, l0, policy) == 0);
  // never meets l0: angle stays inside (0, pi)
  LagrangianPath t = rotating_path(sp, 0.4, 2.6, 12);
  CHECK(maslov_index(t, l0, policy) == 0);
}

TEST_CASE("golden rotating example") {
  TolerancePolicy policy;
  SymplecticSpace sp = standard_space(1);
  const double pi = std::acos(-1.0);
  // l0 = span(e2): the chart form is cot t, one downward crossing at pi/2
  Lagrangian l0 = make_lagrangian(sp, line(pi / 2), policy);
  LagrangianPath p = rotating_path(sp, pi / 4, 3 * pi / 4, 8);
  CHECK(maslov_index(p, l0, policy) == -1);
  CHECK(maslov_index(reverse(p), l0, policy) == 1);
  CHECK(maslov_oracle(p, l0, policy) == -1);
  // a full turn crosses l0 twice with the same sign
  LagrangianPath full = rotating_path(sp, 0.1, 0.1 + pi, 16);
  const long long mu_full = maslov_index(full, l0, policy);
  CHECK(mu_full == -1);
}

TEST_CASE("maslov index agrees with the randomized oracle on generated scenarios") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    LagOptions opt;
    opt.hit_L0 = trial % 3 == 0;
    opt.degenerate_endpoints = trial % 4 == 0;
    LagScenario sc = gen_lagrangian_scenario(Seed{79, trial}, 2 + int(trial % 3),
                                             int(trial % 3), opt);
    const long long mu = maslov_index(sc.path, sc.l0, policy);
    CHECK(mu == maslov_oracle(sc.path, sc.l0, policy, 1000 + trial));
  }
}

TEST_CASE("a single admissible chart reproduces the index directly") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    LagScenario sc = gen_lagrangian_scenario(Seed{83, trial}, 2, 0);
    ChartSegment seg = make_chart_segment(sc.path, sc.l0, sc.l1, policy);
    CHECK(maslov_index(sc.path, sc.l0, policy) ==
          spectral_flow(seg.form_path, policy, spectral_norm(sc.space.omega)).flow);
  }
}
