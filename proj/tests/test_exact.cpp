#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "zeeman/exact.hpp"

using zeeman::Rational;
using zeeman::Surd;

TEST_CASE("rational_normalizes_sign_and_gcd") {
  const Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(Rational(0, -7) == Rational(0));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
}

TEST_CASE("rational_overflow_is_reported") {
  const Rational big(INT64_MAX);
  CHECK_THROWS_AS(big * Rational(2), std::overflow_error);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("surd_sqrt_extracts_square_factors") {
  CHECK(Surd::sqrt_of(8) == Surd(Rational(2), 2));
  CHECK(Surd::sqrt_of(720) == Surd(Rational(12), 5));
  CHECK(Surd::sqrt_of(49) == Surd(7));
  CHECK(Surd::sqrt_of(0).is_zero());
  const std::uint64_t f[] = {3, 4, 5, 6};
  CHECK(Surd::sqrt_of_product(f) == Surd::sqrt_of(360));
}

TEST_CASE("surd_products_combine_radicands") {
  const Surd r2 = Surd::sqrt_of(2);
  const Surd r3 = Surd::sqrt_of(3);
  const Surd r6 = Surd::sqrt_of(6);
  CHECK(r2 * r2 == Surd(2));
  CHECK(r2 * r3 == r6);
  CHECK(r6 * r2 == Surd(Rational(2), 3));
  CHECK((r2 + Surd(1)) * (r2 - Surd(1)) == Surd(1));
  CHECK((r2 - r2).is_zero());
}

TEST_CASE("surd_string_form_is_canonical") {
  const Surd x = Surd(-18) + Surd(Rational(-21), 2) + Surd(Rational(-25), 10);
  CHECK(x.str() == "-18 - 21*sqrt(2) - 25*sqrt(10)");
  CHECK(Surd(Rational(-3, 2), 2).str() == "-3/2*sqrt(2)");
  CHECK(Surd().str() == "0");
}

TEST_CASE("surd_arithmetic_matches_floating_point") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-20, 20);
  std::uniform_int_distribution<int> rad(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    Surd x, y;
    for (int k = 0; k < 3; ++k) {
      x += Surd(Rational(coef(rng)), 1) * Surd::sqrt_of(static_cast<std::uint64_t>(rad(rng)));
      y += Surd(Rational(coef(rng)), 1) * Surd::sqrt_of(static_cast<std::uint64_t>(rad(rng)));
    }
    const double xd = x.to_double();
    const double yd = y.to_double();
    CHECK((x * y).to_double() == Catch::Approx(xd * yd).margin(1e-9));
    CHECK((x + y).to_double() == Catch::Approx(xd + yd).margin(1e-12));
    CHECK((x * y) == (y * x));
  }
}
