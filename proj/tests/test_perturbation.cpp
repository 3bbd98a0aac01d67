#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zeeman/perturbation.hpp"

using namespace zeeman;
using Catch::Approx;

TEST_CASE("k0_examples") {
  CHECK(k0(0, 0, 2.0) == 2.0);
  CHECK(k0(1, 2, 1.0) == 4.0);
  for (unsigned a = 0; a <= 10; ++a)
    for (unsigned b = 0; a + b <= 10; ++b) CHECK(k0(a, b, 1.7) == k0(b, a, 1.7));
}

TEST_CASE("k0_matches_H0_eigenvalue") {
  const auto h0 = build_H0(Surd(3));
  for (unsigned a = 0; a <= 10; ++a)
    for (unsigned b = 0; a + b <= 10; ++b)
      CHECK(matrix_element({a, b}, {a, b}, h0) == Surd(static_cast<std::int64_t>(3 * (a + b + 1))));
}

TEST_CASE("delta_paper_termwise_values") {
  CHECK(delta_paper(0, 0) == Surd(20));
  CHECK(delta_paper(1, 0) == Surd(67) + Surd(Rational(2), 2));
  CHECK(delta_paper(1, 0).to_double() == Approx(69.8284).epsilon(1e-6));
  // the printed form carries an extra n2-only surd term, so it is not swap symmetric
  CHECK(delta_paper(1, 0) != delta_paper(0, 1));
}

TEST_CASE("delta_oracle_values") {
  CHECK(delta_oracle(0, 0) == Surd(48));
  const std::int64_t frozen[][3] = {{0, 0, 48}, {1, 0, 192}, {1, 1, 480}, {2, 0, 552}, {2, 1, 1056}, {3, 0, 1248}};
  for (const auto& row : frozen) {
    const auto a = static_cast<unsigned>(row[0]), b = static_cast<unsigned>(row[1]);
    CHECK(delta_oracle(a, b) == Surd(row[2]));
    CHECK(delta_oracle(b, a) == Surd(row[2]));
  }
}

TEST_CASE("delta_oracle_agrees_with_dense_product") {
  CHECK(delta_oracle_dense(0, 0, 10) == Surd(48));
  for (unsigned a = 0; a <= 3; ++a)
    for (unsigned b = 0; b <= 3; ++b) CHECK(delta_oracle_dense(a, b, 10) == delta_oracle(a, b));
}

TEST_CASE("delta_oracle_grows_with_level") {
  auto level_max = [](unsigned t) {
    double m = 0;
    for (unsigned a = 0; a <= t; ++a) m = std::max(m, delta_oracle(a, t - a).to_double());
    return m;
  };
  auto level_min = [](unsigned t) {
    double m = 1e300;
    for (unsigned a = 0; a <= t; ++a) m = std::min(m, delta_oracle(a, t - a).to_double());
    return m;
  };
  for (unsigned t = 0; t < 6; ++t) CHECK(level_max(t) < level_min(t + 1));
}

TEST_CASE("k1_examples") {
  CHECK(k1(2, 1, 1.3, 0.0, DeltaSource::oracle) == k0(2, 1, 1.3));
  CHECK(k1(0, 0, 1.0, 1.0, DeltaSource::oracle) == 7.0);
  CHECK(k1(0, 0, 1.0, 1.0, DeltaSource::paper) == 3.5);
}

TEST_CASE("energy_examples") {
  CHECK(energy(0, 0, 0.0, 1.0, DeltaSource::oracle) == -0.5);
  CHECK(energy(1, 0, 0.0, 1.0, DeltaSource::paper) == -0.125);
  for (unsigned N = 1; N <= 6; ++N)
    for (unsigned a = 0; a < N; ++a) {
      const double k = 1.3;
      CHECK(energy(a, N - 1 - a, 0.0, k, DeltaSource::oracle) == Approx(-k * k / (2.0 * N * N)).epsilon(1e-12));
      CHECK(energy(a, N - 1 - a, 0.7, k, 5.0) == energy(0, N - 1, 0.7, k, 5.0));
    }
}

TEST_CASE("ground_state_first_order_coefficients") {
  const auto [state, rep] = first_order_state(0, 0, 1.0, 1.0);
  const auto* r20 = rep.row({2, 0});
  REQUIRE(r20);
  CHECK(r20->oracle == Surd(Rational(-36), 2));
  REQUIRE(rep.row({6, 0}));
  CHECK(rep.row({6, 0})->oracle == Surd(Rational(-2), 5));
  CHECK(rep.row({2, 2})->oracle == Surd(-18));
  CHECK(rep.row({4, 2})->oracle == Surd(Rational(-2), 3));
  CHECK(rep.row({0, 6})->oracle == rep.row({6, 0})->oracle);
  // printed values stored verbatim
  CHECK(r20->paper->text == "-21*sqrt(2) - 18 - 25*sqrt(10)");
  CHECK(*r20->paper->exact == Surd(-18) + Surd(Rational(-21), 2) + Surd(Rational(-25), 10));
  CHECK(rep.row({6, 0})->paper->exact->str() == "-8*sqrt(1155)");
  CHECK(rep.row({2, 2})->paper->exact->str() == "-3 - 3/2*sqrt(2)");
  CHECK(rep.paper_literal_available);
  CHECK(rep.degenerate.empty());
  CHECK(state.coefficient({2, 0}) == Approx(-36.0 * std::sqrt(2.0) / 8.0).epsilon(1e-14));
}

TEST_CASE("ground_state_coefficient_matches_dense_brute_force_at_cutoff_16") {
  for (auto [n1, n2] : {std::pair{0u, 0u}, {1u, 0u}, {0u, 1u}, {1u, 1u}, {2u, 0u}}) {
    const double W = 1.3, B = 0.8;
    const auto exact = first_order_state(n1, n2, W, B).state;
    const auto dense = first_order_state_dense(n1, n2, W, B, 16);
    for (const auto& [l, c] : exact.coefficients) CHECK(dense.coefficient(l) == Approx(c).margin(1e-10));
    for (const auto& [l, c] : dense.coefficients) CHECK(exact.coefficient(l) == Approx(c).margin(1e-10));
  }
}

TEST_CASE("zero_field_leaves_state_unchanged") {
  const auto s = first_order_state(1, 2, 2.0, 0.0).state;
  CHECK(s.coefficients.size() == 1);
  CHECK(s.coefficient({1, 2}) == 1.0);
}

TEST_CASE("parity_and_reach") {
  for (unsigned n1 = 0; n1 <= 2; ++n1)
    for (unsigned n2 = 0; n2 <= 2; ++n2) {
      const auto rep = first_order_state(n1, n2, 1.0, 1.0).report;
      for (const auto& r : rep.rows) {
        if (r.oracle.is_zero()) continue;
        CHECK((r.target.n1 + n1) % 2 == 0);
        CHECK((r.target.n2 + n2) % 2 == 0);
        CHECK(r.target.total() <= n1 + n2 + 6);
        CHECK(r.target.total() != n1 + n2);
      }
    }
}

TEST_CASE("coefficient_scaling_in_B_and_W") {
  const auto a = first_order_state(1, 1, 1.0, 0.5).state;
  const auto b = first_order_state(1, 1, 1.0, 1.0).state;
  const auto c = first_order_state(1, 1, 2.0, 1.0).state;
  for (const auto& [l, v] : a.coefficients) {
    if (l == FockLabel{1, 1}) continue;
    CHECK(b.coefficient(l) == Approx(4.0 * v).epsilon(1e-14));
    CHECK(c.coefficient(l) == Approx(2.0 * v).epsilon(1e-14));
  }
}

TEST_CASE("excited_level_printed_tables") {
  const auto rep10 = first_order_state(1, 0, 1.0, 1.0, StateMode::paper_literal).report;
  CHECK(rep10.row({1, 2})->paper->value == 89.30);
  CHECK(rep10.row({7, 0})->paper->value == -11.83);
  // (5,4) is printed but lies outside the reach of a degree-6 operator
  CHECK(rep10.row({5, 4})->oracle.is_zero());
  const auto rep01 = first_order_state(0, 1, 1.0, 1.0, StateMode::paper_literal).report;
  CHECK(rep01.row({2, 1})->paper->value == -89.30);
  CHECK(rep01.row({0, 7})->paper->value == 11.83);
  CHECK(rep01.row({0, 7})->paper->text == "11.83");
  CHECK(rep01.row({0, 7})->paper->verbatim == "11,83");
  CHECK(rep10.row({1, 2})->paper->verbatim == "89,30");
}

TEST_CASE("paper_literal_state_uses_printed_coefficients") {
  const auto s = first_order_state(1, 0, 2.0, 1.0, StateMode::paper_literal).state;
  CHECK(s.coefficient({1, 2}) == Approx(89.30 / 16.0).epsilon(1e-15));
  CHECK(s.coefficient({5, 4}) == Approx(-10.31 / 16.0).epsilon(1e-15));
  const auto fallback = first_order_state(1, 1, 1.0, 1.0, StateMode::paper_literal);
  CHECK_FALSE(fallback.report.paper_literal_available);
  CHECK(fallback.state.coefficients == first_order_state(1, 1, 1.0, 1.0).state.coefficients);
}

TEST_CASE("degenerate_coupling_diagnostic") {
  const auto rep = first_order_state(2, 0, 1.0, 1.0).report;
  bool found = false;
  for (const auto& d : rep.degenerate)
    if (d.target == FockLabel{0, 2}) {
      found = true;
      CHECK(d.bracket_element == Surd(72));
    }
  CHECK(found);
}

TEST_CASE("mode_swap_relations") {
  const auto s10 = first_order_state(1, 0, 1.0, 1.0).state;
  const auto s01 = first_order_state(0, 1, 1.0, 1.0).state;
  const auto swapped = mode_swap(s10);
  for (const auto& [l, c] : s01.coefficients) CHECK(std::abs(swapped.coefficient(l)) == Approx(std::abs(c)).epsilon(1e-14));
  CHECK(mode_swap(mode_swap(s10)).coefficients == s10.coefficients);
  const auto s11 = first_order_state(1, 1, 1.0, 1.0).state;
  CHECK(mode_swap(s11).coefficients == s11.coefficients);
}

TEST_CASE("cutoff_validation") {
  CHECK_THROWS_AS(first_order_state(1, 1, 1.0, 1.0, StateMode::oracle, 8), CutoffTooSmall);
  CHECK_NOTHROW(first_order_state(1, 1, 1.0, 1.0, StateMode::oracle, 9));
  CHECK(first_order_state(1, 1, 1.0, 1.0).state.cutoff == 10);
  CHECK_THROWS_AS(first_order_state(0, 0, 0.0, 1.0), ConfigError);
}

TEST_CASE("report_serialization") {
  const auto rep = first_order_state(0, 0, 1.0, 1.0).report;
  const auto csv = to_csv(rep);
  CHECK(csv.find("m1,m2,paper_coefficient,oracle_coefficient,abs_diff\n") != std::string::npos);
  CHECK(csv.find("\n6,0,") != std::string::npos);
  const auto j = to_json(rep);
  CHECK(j["delta_paper"] == 20.0);
  CHECK(j["delta_oracle"] == 48.0);
  CHECK(j["schema_version"] == 1);
  CHECK(to_json(rep).dump() == j.dump());
}
