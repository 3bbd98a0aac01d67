#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "zeeman/fock_algebra.hpp"

using namespace zeeman;

using ExactExpr = LadderExpression<Surd>;
using FloatExpr = LadderExpression<double>;

namespace {

ExactExpr op(Ladder l) { return ExactExpr::factor(l); }
ExactExpr quad_a() { return op(Ladder::a) + op(Ladder::a_dag); }

std::int64_t binomial(unsigned n, unsigned k) {
  std::int64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::int64_t factorial(unsigned n) {
  std::int64_t r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

ExactExpr random_expression(std::mt19937& rng, unsigned max_exp, int terms) {
  std::uniform_int_distribution<unsigned> e(0, max_exp);
  std::uniform_int_distribution<int> c(-3, 3);
  ExactExpr out;
  for (int i = 0; i < terms; ++i) out.add({e(rng), e(rng), e(rng), e(rng)}, Surd(c(rng)));
  return out;
}

}  // namespace

TEST_CASE("normal_order_single_commutator") {
  const std::vector<Ladder> word{Ladder::a, Ladder::a_dag};
  ExactExpr expected;
  expected.add({1, 1, 0, 0}, Surd(1));
  expected.add({}, Surd(1));
  CHECK(normal_order<Surd>(word) == expected);
}

TEST_CASE("normal_order_square_of_quadrature") {
  const std::vector<Ladder> x{Ladder::a, Ladder::a_dag};
  ExactExpr expected;
  expected.add({2, 0, 0, 0}, Surd(1));
  expected.add({0, 2, 0, 0}, Surd(1));
  expected.add({1, 1, 0, 0}, Surd(2));
  expected.add({}, Surd(1));
  CHECK(multiply(quad_a(), quad_a()) == expected);

  // Same thing through the raw-word route.
  ExactExpr raw;
  for (Ladder l1 : {Ladder::a, Ladder::a_dag})
    for (Ladder l2 : {Ladder::a, Ladder::a_dag}) raw += normal_order<Surd>(std::vector<Ladder>{l1, l2});
  CHECK(raw == expected);
}

TEST_CASE("normal_order_modes_commute") {
  const std::vector<Ladder> word{Ladder::a, Ladder::b_dag};
  CHECK(normal_order<Surd>(word) == ExactExpr::word({0, 1, 1, 0}));
}

TEST_CASE("normal_order_is_idempotent") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Ladder> word(8);
    for (auto& l : word) l = static_cast<Ladder>(pick(rng));
    const auto once = normal_order<Surd>(word);
    CHECK(normal_order(once) == once);
  }
}

TEST_CASE("canonical_commutation_relations") {
  const auto one = ExactExpr::identity();
  CHECK(multiply(op(Ladder::a), op(Ladder::a_dag)) - multiply(op(Ladder::a_dag), op(Ladder::a)) == one);
  CHECK(multiply(op(Ladder::b), op(Ladder::b_dag)) - multiply(op(Ladder::b_dag), op(Ladder::b)) == one);
  for (Ladder x : {Ladder::a, Ladder::a_dag})
    for (Ladder y : {Ladder::b, Ladder::b_dag})
      CHECK((multiply(op(x), op(y)) - multiply(op(y), op(x))).empty());
}

TEST_CASE("multiply_number_operator_squared") {
  const auto n = ExactExpr::word({1, 1, 0, 0});
  ExactExpr expected;
  expected.add({2, 2, 0, 0}, Surd(1));
  expected.add({1, 1, 0, 0}, Surd(1));
  CHECK(multiply(n, n) == expected);

  // Dense oracle: N^2 is diag(n^2) on the truncated basis.
  const auto dense_n = dense_matrix(n, 10);
  const auto n2 = dense_n * dense_n;
  const auto symbolic = dense_matrix(expected, 10);
  for (unsigned k = 0; k <= 6; ++k) {
    CHECK(n2.at({k, 0}, {k, 0}) == Surd(static_cast<std::int64_t>(k * k)));
    CHECK(symbolic.at({k, 0}, {k, 0}) == n2.at({k, 0}, {k, 0}));
  }
}

TEST_CASE("multiply_identity_and_commuting_modes") {
  std::mt19937 rng(3);
  const auto x = random_expression(rng, 3, 5);
  CHECK(multiply(ExactExpr::identity(), x) == x);
  CHECK(multiply(x, ExactExpr::identity()) == x);

  const auto ya = ExactExpr::word({2, 1, 0, 0}, Surd(3));
  const auto yb = ExactExpr::word({0, 0, 1, 2}, Surd(-2));
  CHECK(multiply(ya, yb) == ExactExpr::word({2, 1, 1, 2}, Surd(-6)));
}

TEST_CASE("multiply_matches_wick_contraction_formula") {
  // (a+^r1 a^s1)(a+^r2 a^s2) = sum_k C(s1,k) C(r2,k) k! a+^(r1+r2-k) a^(s1+s2-k)
  for (unsigned r1 = 0; r1 <= 4; ++r1)
    for (unsigned s1 = 0; s1 <= 4; ++s1)
      for (unsigned r2 = 0; r2 <= 4; ++r2)
        for (unsigned s2 = 0; s2 <= 4; ++s2) {
          ExactExpr wick;
          for (unsigned k = 0; k <= std::min(s1, r2); ++k)
            wick.add({r1 + r2 - k, s1 + s2 - k, 0, 0}, Surd(binomial(s1, k) * binomial(r2, k) * factorial(k)));
          CHECK(multiply(ExactExpr::word({r1, s1, 0, 0}), ExactExpr::word({r2, s2, 0, 0})) == wick);
        }
}

TEST_CASE("multiply_is_associative_and_distributive") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_expression(rng, 2, 3);
    const auto y = random_expression(rng, 2, 3);
    const auto z = random_expression(rng, 2, 3);
    CHECK(multiply(multiply(x, y), z) == multiply(x, multiply(y, z)));
    CHECK(multiply(x, y + z) == multiply(x, y) + multiply(x, z));
  }
}

TEST_CASE("build_H1_zero_field_vanishes") {
  CHECK(build_H1(Surd(0)).empty());
  CHECK(build_H1(0.0).empty());
}

TEST_CASE("build_H1_vacuum_expectation") {
  // <X^6> = 15, <X^4> = 3, <X^2> = 1: 15 + 3*3 + 3*3 + 15 = 48, times 1/8.
  CHECK(matrix_element({0, 0}, {0, 0}, build_H1(Surd(1))) == Surd(6));
  CHECK(matrix_element({0, 0}, {0, 0}, build_H1_bracket<Surd>()) == Surd(48));
  CHECK(matrix_element({0, 0}, {0, 0}, build_H1(1.0)) == Catch::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("build_H1_is_hermitian_and_mode_symmetric") {
  const auto h = build_H1(Surd(1));
  CHECK(is_hermitian(h));
  CHECK(mode_swap(h) == h);
  CHECK(h.degree() == 6);
  for (const auto& [e, c] : h.terms()) {
    CHECK((e.a_dag + e.a) % 2 == 0);
    CHECK((e.b_dag + e.b) % 2 == 0);
  }
}

TEST_CASE("build_H0_spectrum") {
  const auto h0 = build_H0(Surd(1));
  CHECK(matrix_element({0, 0}, {0, 0}, h0) == Surd(1));
  CHECK(matrix_element({1, 2}, {1, 2}, h0) == Surd(4));
  CHECK(matrix_element({1, 0}, {0, 1}, h0).is_zero());
  CHECK(matrix_element({3, 4}, {3, 4}, build_H0(2.5)) == Catch::Approx(20.0));
}

TEST_CASE("build_H0_printed_ordering_shifts_by_two") {
  const auto printed = build_H0_printed_ordering(Surd(1));
  CHECK(matrix_element({0, 0}, {0, 0}, printed) == Surd(3));
  CHECK(printed - build_H0(Surd(1)) == ExactExpr::identity(Surd(2)));
}

TEST_CASE("matrix_element_examples") {
  const auto x = quad_a();
  CHECK(matrix_element({1, 0}, {0, 0}, x) == Surd(1));
  CHECK(matrix_element({2, 0}, {0, 0}, multiply(x, x)) == Surd::sqrt_of(2));
  const auto x6 = power(x, 6);
  CHECK(matrix_element({2, 0}, {0, 0}, x6) == Surd(Rational(45), 2));
  CHECK(matrix_element({6, 0}, {0, 0}, x6) == Surd(Rational(12), 5));
}

TEST_CASE("x6_element_agrees_with_literal_dense_power") {
  const unsigned cutoff = 14;
  const auto a = FockMatrix<Surd>::elementary(Ladder::a, cutoff);
  const auto ad = FockMatrix<Surd>::elementary(Ladder::a_dag, cutoff);
  const auto x = a + ad;
  auto x6 = FockMatrix<Surd>::identity(cutoff);
  for (int i = 0; i < 6; ++i) x6 = x6 * x;
  CHECK(x6.at({2, 0}, {0, 0}) == Surd(Rational(45), 2));
  CHECK(x6.at({6, 0}, {0, 0}) == Surd(Rational(12), 5));
  CHECK(x6.at({0, 0}, {0, 0}) == Surd(15));
}

TEST_CASE("dense_matrix_number_operator_diagonal") {
  const auto n = dense_matrix(ExactExpr::word({1, 1, 0, 0}), 5);
  for (unsigned k = 0; k <= 5; ++k)
    for (unsigned j = 0; j <= 5; ++j) CHECK(n.raw({k, j}, {k, j}) == Surd(static_cast<std::int64_t>(k)));
}

TEST_CASE("dense_matrix_agrees_with_symbolic_H1") {
  const auto h = build_H1(Surd(1));
  const auto dense = dense_matrix(h, 14);
  CHECK(dense.at({2, 0}, {0, 0}) == matrix_element({2, 0}, {0, 0}, h));
  CHECK(dense.at({2, 0}, {0, 0}) == Surd(Rational(9), 2));
  CHECK(dense.is_symmetric());
}

TEST_CASE("dense_matrix_refuses_untrusted_elements") {
  const auto dense = dense_matrix(build_H1(Surd(1)), 10);
  CHECK_NOTHROW(dense.at({4, 4}, {2, 0}));
  CHECK_THROWS_AS(dense.at({5, 0}, {0, 0}), CutoffTooSmall);
}

TEST_CASE("H1_parity_and_symmetry_of_elements") {
  const auto h = build_H1_bracket<Surd>();
  for (unsigned m1 = 0; m1 <= 5; ++m1)
    for (unsigned m2 = 0; m2 <= 5; ++m2)
      for (unsigned n1 = 0; n1 <= 5; ++n1)
        for (unsigned n2 = 0; n2 <= 5; ++n2) {
          const auto v = matrix_element({m1, m2}, {n1, n2}, h);
          if ((m1 + n1) % 2 || (m2 + n2) % 2) CHECK(v.is_zero());
          CHECK(v == matrix_element({n1, n2}, {m1, m2}, h));
        }
}

TEST_CASE("float_and_exact_pipelines_agree") {
  const auto exact = build_H1_bracket<Surd>();
  const auto floating = build_H1_bracket<double>();
  const auto dense = dense_matrix(floating, 12);
  for (unsigned m1 = 0; m1 <= 6; m1 += 2)
    for (unsigned n2 = 0; n2 <= 6; ++n2) {
      const FockLabel bra{m1, 1}, ket{0, n2};
      const double e = matrix_element(bra, ket, exact).to_double();
      CHECK(matrix_element(bra, ket, floating) == Catch::Approx(e).margin(1e-9));
      CHECK(dense.at(bra, ket) == Catch::Approx(e).margin(1e-9));
    }
}
