#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sfm/errors.hpp"
#include "sfm/quadform.hpp"

using namespace sfm;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix m(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

Subspace span_cols(int ambient, std::initializer_list<int> axes) {
  Matrix f(ambient, int(axes.size()));
  int j = 0;
  for (int i : axes) f(i, j++) = 1.0;
  return Subspace(ambient, f);
}

Matrix random_symmetric(std::mt19937_64& eng, int n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(eng);
  return symmetrize(m);
}

}  // namespace

TEST_CASE("index_nullity of a diagonal form") {
  TolerancePolicy policy;
  auto q = BilinForm::on_full(diag3(1.0, -2.0, 0.0), Symmetry::symmetric);
  auto rep = index_nullity(q, policy);
  CHECK(rep.index == 1);
  CHECK(rep.nullity == 1);
  CHECK(rep.coindex == 1);
}

TEST_CASE("declared symmetry is enforced") {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = -1.0;
  CHECK_THROWS_AS(BilinForm::on_full(m, Symmetry::symmetric), DomainError);
  CHECK_NOTHROW(BilinForm::on_full(m, Symmetry::skew));
  m(1, 0) = 1.0;
  CHECK_NOTHROW(BilinForm::on_full(m, Symmetry::symmetric));
  CHECK_THROWS_AS(BilinForm::on_full(m, Symmetry::skew), DomainError);
}

TEST_CASE("restrict takes the matrix in the subspace frame") {
  TolerancePolicy policy;
  auto q = BilinForm::on_full(diag3(1.0, -2.0, 0.0), Symmetry::symmetric);
  auto r = restrict(q, span_cols(3, {1, 2}), policy);
  CHECK(r.dim() == 2);
  auto rep = index_nullity(r, policy);
  CHECK(rep.index == 1);
  CHECK(rep.nullity == 1);
}

TEST_CASE("perp and form_kernel on a diagonal form") {
  TolerancePolicy policy;
  auto q = BilinForm::on_full(diag3(0.0, 1.0, -1.0), Symmetry::symmetric);
  CHECK(subspaces_equal(form_kernel(q, policy), span_cols(3, {0}), policy));
  // w = span(e1, e2): Q-orthogonal complement is span(e1, e3)
  Subspace w = span_cols(3, {0, 1});
  CHECK(subspaces_equal(perp(q, w, policy), span_cols(3, {0, 2}), policy));
}

TEST_CASE("index restriction identity on hand-checkable cases") {
  TolerancePolicy policy;
  // every term is nonzero here: lhs = 1, rhs = 1 + 1 - 1
  auto q = BilinForm::on_full(diag3(0.0, 1.0, -1.0), Symmetry::symmetric);
  auto [lhs, rhs] = eq1_sides(q, span_cols(3, {0, 1}), policy);
  CHECK(lhs == 1);
  CHECK(rhs == 1);

  auto id = BilinForm::on_full(Matrix::identity(3), Symmetry::symmetric);
  for (auto w : {span_cols(3, {0}), span_cols(3, {0, 2}), span_cols(3, {0, 1, 2})}) {
    auto [l2, r2] = eq1_sides(id, w, policy);
    CHECK(l2 == 0);
    CHECK(r2 == 0);
  }
}

TEST_CASE("index restriction identity on random forms and subspaces") {
  TolerancePolicy policy;
  std::mt19937_64 eng(23);
  std::uniform_int_distribution<int> dim(2, 8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dim(eng);
    auto q = BilinForm::on_full(random_symmetric(eng, n), Symmetry::symmetric);
    std::uniform_int_distribution<int> wd(1, n - 1);
    Matrix cols(n, wd(eng));
    for (int i = 0; i < cols.rows(); ++i)
      for (int j = 0; j < cols.cols(); ++j) cols(i, j) = g(eng);
    Subspace w = column_space(cols, policy);
    auto [lhs, rhs] = eq1_sides(q, w, policy);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("is_nondegenerate_on detects the kernel") {
  TolerancePolicy policy;
  auto q = BilinForm::on_full(diag3(0.0, 1.0, -1.0), Symmetry::symmetric);
  CHECK(is_nondegenerate_on(q, span_cols(3, {1, 2}), policy));
  CHECK(!is_nondegenerate_on(q, span_cols(3, {0, 1}), policy));
}

TEST_CASE("scale propagates through restriction") {
  TolerancePolicy policy;
  // restricting a unit-scale form to a subspace where it nearly vanishes
  // must report a zero form, not a tiny invertible one
  Matrix m = diag3(1.0, 1e-13, -1e-13);
  auto q = BilinForm::on_full(m, Symmetry::symmetric);
  auto r = restrict(q, span_cols(3, {1, 2}), policy);
  CHECK(r.scale() == doctest::Approx(1.0));
  CHECK(index_nullity(r, policy).nullity == 2);
}
