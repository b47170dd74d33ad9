#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfm/errors.hpp"
#include "sfm/scenarios.hpp"

using namespace sfm;

TEST_CASE("generators are pure functions of the seed") {
  SymMatrix a = gen_symmetric(Seed{5, 9}, 6);
  SymMatrix b = gen_symmetric(Seed{5, 9}, 6);
  CHECK(a.mat() == b.mat());
  CHECK(!(gen_symmetric(Seed{5, 10}, 6).mat() == a.mat()));

  FormPath p1 = gen_form_path(Seed{6, 0}, 4, 7);
  FormPath p2 = gen_form_path(Seed{6, 0}, 4, 7);
  REQUIRE(p1.mesh() == p2.mesh());
  for (std::size_t i = 0; i < p1.samples().size(); ++i)
    CHECK(p1.samples()[i].mat() == p2.samples()[i].mat());
}

TEST_CASE("sign patterns fix index and nullity by construction") {
  TolerancePolicy policy;
  std::vector<SignEntry> pattern{SignEntry::plus, SignEntry::minus, SignEntry::minus,
                                 SignEntry::zero, SignEntry::plus};
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    SymMatrix m = gen_symmetric(Seed{101, trial}, 5, pattern);
    auto rep = index_nullity(BilinForm::on_full(m.mat(), Symmetry::symmetric), policy);
    CHECK(rep.index == 2);
    CHECK(rep.nullity == 1);
    CHECK(rep.coindex == 2);
  }
}

TEST_CASE("path options deliver the promised structure") {
  TolerancePolicy policy;
  SUBCASE("invertible") {
    PathOptions opt;
    opt.invertible = true;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      FormPath p = gen_form_path(Seed{103, trial}, 4, 6, opt);
      for (const auto& s : p.samples()) {
        auto e = eigh(s);
        for (double v : e.values) CHECK(std::abs(v) > 0.5);
      }
    }
  }
  SUBCASE("closed") {
    PathOptions opt;
    opt.closed = true;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      FormPath p = gen_form_path(Seed{107, trial}, 3, 7, opt);
      CHECK(p.closed(policy));
      CHECK((p.samples().front().mat() - p.samples().back().mat()).max_abs() < 1e-12);
    }
  }
  SUBCASE("constant kernel") {
    PathOptions opt;
    opt.constant_kernel_dim = 2;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      FormPath p = gen_form_path(Seed{109, trial}, 5, 6, opt);
      for (const auto& s : p.samples())
        CHECK(kernel(s.mat(), policy).dim() == 2);
    }
  }
  SUBCASE("endpoint patterns") {
    PathOptions opt;
    opt.endpoint_pattern_a = {SignEntry::minus, SignEntry::zero, SignEntry::plus};
    opt.endpoint_pattern_b = {SignEntry::plus, SignEntry::plus, SignEntry::plus};
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      FormPath p = gen_form_path(Seed{113, trial}, 3, 6, opt);
      auto a = index_nullity(BilinForm::on_full(p.samples().front().mat(),
                                                Symmetry::symmetric),
                             policy);
      auto b = index_nullity(BilinForm::on_full(p.samples().back().mat(),
                                                Symmetry::symmetric),
                             policy);
      CHECK(a.index == 1);
      CHECK(a.nullity == 1);
      CHECK(b.index == 0);
      CHECK(b.nullity == 0);
    }
  }
  SUBCASE("inconsistent options are rejected") {
    PathOptions opt;
    opt.invertible = true;
    opt.constant_kernel_dim = 1;
    CHECK_THROWS_AS(gen_form_path(Seed{1, 1}, 4, 6, opt), DomainError);
  }
}

TEST_CASE("nondegenerate-subspace search meets its postcondition") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const int n = 4 + int(trial % 4);
    const int codim = 1 + int(trial % 3);
    auto q1 = BilinForm::on_full(gen_symmetric(Seed{127, trial}, n).mat(), Symmetry::symmetric);
    auto q2 = BilinForm::on_full(gen_symmetric(Seed{131, trial}, n).mat(), Symmetry::symmetric);
    Subspace v = find_nondegenerate_subspace(q1, q2, Subspace::full(n), codim,
                                             Seed{137, trial}, policy);
    CHECK(v.dim() == n - codim);
    CHECK(is_nondegenerate_on(q1, v, policy));
    CHECK(is_nondegenerate_on(q2, v, policy));
  }
}

TEST_CASE("random lagrangians and isotropic subspaces check out") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    Rng rng(Seed{139, trial});
    const int n = 2 + int(trial % 3);
    SymplecticSpace sp = standard_space(n);
    Lagrangian l = random_lagrangian(rng, sp);
    CHECK(is_lagrangian(sp, l.sub, policy));
    const int k = 1 + int(trial % 2);
    Subspace iso = random_isotropic(rng, sp, k);
    CHECK(iso.dim() == k);
    Matrix rest = iso.frame().transpose() * sp.omega * iso.frame();
    CHECK(rest.max_abs() < 1e-10);
  }
}

TEST_CASE("lagrangian scenarios are admissible by construction") {
  TolerancePolicy policy;
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    const int n = 2 + int(trial % 3);
    const int k = int(trial % 3);
    LagOptions opt;
    opt.hit_L0 = trial % 2 == 0;
    opt.degenerate_endpoints = trial % 3 == 0;
    LagScenario sc = gen_lagrangian_scenario(Seed{149, trial}, n, k, opt);
    CHECK(sc.setup.codim() == k);
    CHECK(intersect(sc.l0.sub, sc.setup.w_perp, policy).dim() == 0);
    for (const auto& f : sc.path.frames) {
      CHECK(is_lagrangian(sc.space, f, policy));
      CHECK(intersect(f, sc.setup.w_perp, policy).dim() == 0);
    }
    if (opt.hit_L0) {
      bool hits = false;
      for (const auto& f : sc.path.frames)
        hits = hits || intersect(f, sc.l0.sub, policy).dim() > 0;
      CHECK(hits);
    }
    if (opt.degenerate_endpoints) {
      CHECK(intersect(sc.path.frames.front(), sc.l0.sub, policy).dim() > 0);
      CHECK(intersect(sc.path.frames.back(), sc.l0.sub, policy).dim() > 0);
    }
    // the generator's own chart stays admissible along the path
    for (const auto& f : sc.path.frames)
      CHECK(intersect(f, sc.l1.sub, policy).dim() == 0);
    // same seed, same scenario
    LagScenario again = gen_lagrangian_scenario(Seed{149, trial}, n, k, opt);
    CHECK(again.path.frames.back().frame() == sc.path.frames.back().frame());
  }
}
