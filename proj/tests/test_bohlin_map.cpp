#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "zeeman/bohlin_map.hpp"

using namespace zeeman;
using Catch::Approx;

TEST_CASE("to_cartesian_examples") {
  for (auto c : {MomentumConvention::canonical, MomentumConvention::paper_literal}) {
    const auto a = to_cartesian({1.0, 0.0, 2.0, 0.0}, c);
    CHECK(a.x == 1.0);
    CHECK(a.y == 0.0);
    CHECK(a.Px == 1.0);
    CHECK(a.Py == 0.0);
    const auto b = to_cartesian({1.0, 1.0, 0.0, 0.0}, c);
    CHECK(b.x == 0.0);
    CHECK(b.y == 2.0);
    CHECK(b.Px == 0.0);
    CHECK(b.Py == 0.0);
  }
}

TEST_CASE("to_cartesian_printed_momenta_formula") {
  // (p1 q1 + p2 q2) / 2r and (p2 q1 - p1 q2) / 2r at an off-axis point
  const ParabolicState s{0.6, -1.3, 0.9, 2.2};
  const double r = 0.36 + 1.69;
  const auto v = to_cartesian(s, MomentumConvention::paper_literal);
  CHECK(v.Px == Approx((0.9 * 0.6 + 2.2 * -1.3) / (2 * r)).epsilon(1e-15));
  CHECK(v.Py == Approx((2.2 * 0.6 - 0.9 * -1.3) / (2 * r)).epsilon(1e-15));
}

TEST_CASE("squared_radius_identity") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_parabolic_point(rng);
    const auto v = to_cartesian(s);
    const double r = s.q1 * s.q1 + s.q2 * s.q2;
    CHECK(std::abs(v.x * v.x + v.y * v.y - r * r) < 1e-12 * std::max(1.0, r * r));
  }
}

TEST_CASE("singular_origin") {
  CHECK_THROWS_AS(to_cartesian({0.0, 0.0, 1.0, 1.0}), SingularOrigin);
  CHECK_THROWS_AS(poisson_check({0.0, 0.0, 1.0, 1.0}), SingularOrigin);
  CHECK_THROWS_AS(cartesian_hamiltonian({0.0, 0.0, 1.0, 0.0}, {}), SingularOrigin);
}

TEST_CASE("cartesian_hamiltonian_examples") {
  CHECK(cartesian_hamiltonian({1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 1.0}) == -1.0);
  CHECK(cartesian_hamiltonian({1.0, 0.0, 0.0, 0.0}, {2.0, 1.0, 0.0}) == 0.5);
}

TEST_CASE("parabolic_constraint_examples") {
  CHECK(parabolic_constraint({1.0, 0.0, 2.0, 0.0}, {0.0, 1.0, 1.0}) == 0.0);
  CHECK(parabolic_constraint({0.3, -0.8, 0.0, 0.0}, {0.0, 0.0, 0.0}) == 0.0);
  std::mt19937_64 rng(7);
  const ModelParams m{0.7, 1.3, 0.9};
  for (int i = 0; i < 20; ++i) {
    const auto s = random_parabolic_point(rng);
    CHECK(parabolic_constraint({-s.q1, -s.q2, -s.p1, -s.p2}, m) == parabolic_constraint(s, m));
  }
}

TEST_CASE("poisson_hand_value") {
  const auto r = poisson_check({1.0, 0.0, 0.4, -0.2});
  CHECK(r.x_Px == Approx(0.0).margin(1e-15));
  CHECK(r.x_y == 0.0);
}

TEST_CASE("canonical_lift_is_canonical") {
  const auto rep = canonicity_sweep(1000, 20240601);
  CHECK(rep.bracket_residual_max < 1e-9);
  CHECK(rep.radius_identity_max < 1e-12);
  CHECK(rep.samples == 1000);
}

TEST_CASE("printed_momenta_are_not_canonical") {
  // {x, Px} = (q1^2 - q2^2) / r for the printed form
  const ParabolicState s{1.0, 2.0, 0.3, 0.1};
  const auto r = poisson_check(s, MomentumConvention::paper_literal);
  CHECK(r.x_Px + 1.0 == Approx((1.0 - 4.0) / 5.0).epsilon(1e-14));
  CHECK(canonicity_sweep(200, 1, MomentumConvention::paper_literal).bracket_residual_max > 0.5);
}

TEST_CASE("consistency_report_factors") {
  const auto rep = check_consistency({1.0, 1.0, 1.0}, 500, 99);
  CHECK(rep.kinetic_ratio_mean == Approx(4.0).margin(1e-9));
  CHECK(rep.kinetic_ratio_spread < 1e-9);
  CHECK(rep.momentum_rescale == Approx(2.0).margin(1e-9));
  CHECK(rep.coulomb_energy_residual_max < 1e-12);
  CHECK(rep.magnetic_residual_max < 1e-13);
  CHECK(rep.full_residual_max > 1e-3);  // the factor 4 shows up at general points
  CHECK(rep.rescaled_residual_max < 1e-9);
  CHECK(rep.b9_magnetic_power_printed == 3);
  CHECK(rep.b9_magnetic_power_mapped == 2);
}

TEST_CASE("consistency_report_is_deterministic") {
  const auto a = to_json(check_consistency({0.5, 10.0, 1.0}, 100, 5)).dump();
  const auto b = to_json(check_consistency({0.5, 10.0, 1.0}, 100, 5)).dump();
  CHECK(a == b);
  CHECK(to_json(canonicity_sweep(10, 3)).contains("bracket_residual_max"));
}

TEST_CASE("model_params_frequency") {
  CHECK(ModelParams{0.0, 1.0, 1.0}.W() == Approx(std::sqrt(2.0)));
  CHECK(ModelParams{0.0, -1.0, 1.0}.W() == Approx(std::sqrt(2.0)));
  CHECK(ModelParams::from_W(1.0, 3.0).E == 4.5);
}
