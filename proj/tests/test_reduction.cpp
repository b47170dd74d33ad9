#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sfm/errors.hpp"
#include "sfm/reduction.hpp"
#include "sfm/scenarios.hpp"

using namespace sfm;

namespace {

Subspace span_cols(int ambient, std::initializer_list<int> axes) {
  Matrix f(ambient, int(axes.size()));
  int j = 0;
  for (int i : axes) f(i, j++) = 1.0;
  return Subspace(ambient, f);
}

// 2n = 4 hand-checked instance: w_perp = span(e4), l0 = span(e1, e2),
// ell(s) the graph over l0 with chart form diag(s, 1).
struct Worked {
  SymplecticSpace space = standard_space(2);
  Lagrangian l0, l1;
  Subspace w;
  LagrangianPath path;

  explicit Worked(const TolerancePolicy& policy) {
    l0 = make_lagrangian(space, span_cols(4, {0, 1}), policy);
    l1 = make_lagrangian(space, span_cols(4, {2, 3}), policy);
    w = span_cols(4, {0, 2, 3});
    std::vector<double> mesh{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<Subspace> frames;
    for (double s : mesh) frames.push_back(at(s, policy));
    auto self = [this, policy](double s) { return at(s, policy); };
    path = make_lagrangian_path(space, std::move(mesh), std::move(frames), policy, 0.5, self);
  }

  Subspace at(double s, const TolerancePolicy& policy) const {
    return unchart(l0, l1, BilinForm(l0.sub, Matrix(SymMatrix::diag({s, 1.0}).mat()),
                                     Symmetry::symmetric),
                   policy)
        .sub;
  }
};

}  // namespace

TEST_CASE("make_reduction accepts coisotropic subspaces only") {
  TolerancePolicy policy;
  SymplecticSpace sp = standard_space(2);
  // omega-perp of span(e1, e3, e4) is span(e4), contained in it; the perp
  // of span(e1, e3) is span(e2, e4), which is not
  CHECK_NOTHROW(make_reduction(sp, span_cols(4, {0, 2, 3}), policy));
  CHECK_THROWS_AS(make_reduction(sp, span_cols(4, {0, 2}), policy), DomainError);
}

TEST_CASE("the reduced space of the worked instance is standard R^2") {
  TolerancePolicy policy;
  Worked wk(policy);
  ReductionSetup setup = make_reduction(wk.space, wk.w, policy);
  CHECK(setup.codim() == 1);
  CHECK(subspaces_equal(setup.w_perp, span_cols(4, {3}), policy));
  CHECK(setup.reduced.dim == 2);
  // quotient map kills w_perp
  CHECK(setup.q_map(setup.w_perp.frame()).max_abs() < 1e-10);
}

TEST_CASE("worked instance: correction terms at both ends") {
  TolerancePolicy policy;
  Worked wk(policy);
  ReductionSetup setup = make_reduction(wk.space, wk.w, policy);
  for (PathEnd end : {PathEnd::a, PathEnd::b}) {
    CorrectionTerms terms = correction_terms(setup, wk.path, wk.l0, end, policy);
    CHECK(terms.e_dim == 1);  // E = span(e2)
    CHECK(terms.ind_q == 0);  // q[e2, e2] = +1
    CHECK(terms.dim_pi_V == 0);
    CHECK(terms.dim_lV == 0);
  }
}

TEST_CASE("worked instance: indices before and after reduction") {
  TolerancePolicy policy;
  Worked wk(policy);
  ReductionSetup setup = make_reduction(wk.space, wk.w, policy);
  CHECK(maslov_index(wk.path, wk.l0, policy) == 1);
  LagrangianPath red = reduce_path(setup, wk.path, policy);
  Lagrangian red_l0 = reduce_lagrangian(setup, wk.l0, policy);
  CHECK(maslov_index(red, red_l0, policy) == 1);
  auto [lhs, rhs] = theorem2_sides(setup, wk.path, wk.l0, policy);
  CHECK(lhs == 0);
  CHECK(rhs == 0);
}

TEST_CASE("worked instance: the three chart identities hold") {
  TolerancePolicy policy;
  Worked wk(policy);
  ReductionSetup setup = make_reduction(wk.space, wk.w, policy);
  ChartSegment seg = make_chart_segment(wk.path, wk.l0, wk.l1, policy);
  IdentityReport rep = section_4_3_identities(setup, wk.path, wk.l0, seg, policy);
  CHECK(rep.kernel_identity);
  CHECK(rep.perp_identity);
  CHECK(rep.form_identity);
}

TEST_CASE("codimension-zero reduction is the identity on indices") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    LagScenario sc = gen_lagrangian_scenario(Seed{89, trial}, 3, 0);
    ReductionSetup setup = make_reduction(sc.space, Subspace::full(sc.space.dim), policy);
    CHECK(setup.codim() == 0);
    auto [lhs, rhs] = theorem2_sides(setup, sc.path, sc.l0, policy);
    CHECK(lhs == 0);
    CHECK(rhs == 0);
  }
}

TEST_CASE("reduction identity on generated scenarios") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    LagOptions opt;
    opt.hit_L0 = trial % 3 == 0;
    opt.degenerate_endpoints = trial % 4 == 1;
    const int n = 2 + int(trial % 3);
    const int k = 1 + int(trial % (n - 1));
    LagScenario sc = gen_lagrangian_scenario(Seed{97, trial}, n, k, opt);
    auto [lhs, rhs] = theorem2_sides(sc.setup, sc.path, sc.l0, policy);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("paths touching the omega-perp of w are rejected") {
  TolerancePolicy policy;
  Worked wk(policy);
  ReductionSetup setup = make_reduction(wk.space, wk.w, policy);
  // span(e1, e4) is lagrangian and meets w_perp = span(e4)
  std::vector<double> mesh{0.0, 1.0};
  std::vector<Subspace> frames{span_cols(4, {0, 3}), span_cols(4, {0, 3})};
  LagrangianPath bad = make_lagrangian_path(wk.space, mesh, frames, policy);
  CHECK_THROWS_AS(reduce_path(setup, bad, policy), DomainError);
}
