#pragma once

// Bohlin (squaring) map between the planar Coulomb-in-field problem and the
// parabolic oscillator form, with canonicity and consistency audits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeeman/dual.hpp"
#include "zeeman/errors.hpp"

namespace zeeman {

struct CartesianState {
  double x = 0.0;
  double y = 0.0;
  double Px = 0.0;
  double Py = 0.0;
};

struct ParabolicState {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Figure values of E are read as |E|, so W = sqrt(2|E|) is defined for both signs.
struct ModelParams {
  double B = 0.0;
  double E = 1.0;
  double k = 1.0;

  [[nodiscard]] double W() const { return std::sqrt(2.0 * std::abs(E)); }
  static ModelParams from_W(double B, double W, double k = 1.0) { return {B, 0.5 * W * W, k}; }
};

enum class MomentumConvention {
  canonical,      // Px + iPy = (p1 + ip2) / (2 (q1 - iq2)), the cotangent lift
  paper_literal,  // Px + iPy = (p1 + ip2) / (2 (q1 + iq2)), as printed; not canonical
};

inline std::string to_string(MomentumConvention c) {
  return c == MomentumConvention::canonical ? "canonical" : "paper-literal";
}

namespace detail {

constexpr double kOriginEps = 1e-300;

template <class S>
std::array<S, 4> bohlin(const S& q1, const S& q2, const S& p1, const S& p2, MomentumConvention c) {
  const S r = q1 * q1 + q2 * q2;
  const S x = q1 * q1 - q2 * q2;
  const S y = 2.0 * (q1 * q2);
  if (c == MomentumConvention::canonical) return {x, y, (p1 * q1 - p2 * q2) / (2.0 * r), (p1 * q2 + p2 * q1) / (2.0 * r)};
  return {x, y, (p1 * q1 + p2 * q2) / (2.0 * r), (p2 * q1 - p1 * q2) / (2.0 * r)};
}

inline double radius_sq(const ParabolicState& s) { return s.q1 * s.q1 + s.q2 * s.q2; }

}  // namespace detail

inline CartesianState to_cartesian(const ParabolicState& s, MomentumConvention c = MomentumConvention::canonical) {
  if (detail::radius_sq(s) < detail::kOriginEps) throw SingularOrigin("to_cartesian: (q1, q2) at the origin");
  const auto v = detail::bohlin(s.q1, s.q2, s.p1, s.p2, c);
  return {v[0], v[1], v[2], v[3]};
}

/// |P|^2 / 2 - k / rho + (omega^2 / 2) rho^2 with omega = B / 2; the omega L_z term is dropped.
inline double cartesian_hamiltonian(const CartesianState& s, const ModelParams& m) {
  const double rho2 = s.x * s.x + s.y * s.y;
  if (rho2 < detail::kOriginEps) throw SingularOrigin("cartesian_hamiltonian: Coulomb centre");
  const double omega = m.B / 2.0;
  return 0.5 * (s.Px * s.Px + s.Py * s.Py) - m.k / std::sqrt(rho2) + 0.5 * omega * omega * rho2;
}

/// (p1^2 + p2^2)/2 + (B^2/8) r^3 - E r - k with r = q1^2 + q2^2.
inline double parabolic_constraint(const ParabolicState& s, const ModelParams& m) {
  const double r = detail::radius_sq(s);
  return 0.5 * (s.p1 * s.p1 + s.p2 * s.p2) + m.B * m.B / 8.0 * r * r * r - m.E * r - m.k;
}

/// Deviations of the six Cartesian brackets from (1, 1, 0, 0, 0, 0).
struct PoissonResiduals {
  double x_Px = 0.0;
  double y_Py = 0.0;
  double x_y = 0.0;
  double Px_Py = 0.0;
  double x_Py = 0.0;
  double y_Px = 0.0;

  [[nodiscard]] double max_abs() const {
    return std::max({std::abs(x_Px), std::abs(y_Py), std::abs(x_y), std::abs(Px_Py), std::abs(x_Py), std::abs(y_Px)});
  }
};

/// Brackets from exact partial derivatives of the map (dual numbers carry the chain rule).
inline PoissonResiduals poisson_check(const ParabolicState& s, MomentumConvention c = MomentumConvention::canonical) {
  if (detail::radius_sq(s) < detail::kOriginEps) throw SingularOrigin("poisson_check: (q1, q2) at the origin");
  // grad[v][a]: derivative of output v (x, y, Px, Py) w.r.t. input a (q1, q2, p1, p2)
  std::array<std::array<double, 4>, 4> grad{};
  const std::array<double, 4> z{s.q1, s.q2, s.p1, s.p2};
  for (int a = 0; a < 4; ++a) {
    std::array<Dual<double>, 4> in;
    for (int b = 0; b < 4; ++b) in[b] = Dual<double>(z[b], a == b ? 1.0 : 0.0);
    const auto out = detail::bohlin(in[0], in[1], in[2], in[3], c);
    for (int v = 0; v < 4; ++v) grad[v][a] = out[v].d;
  }
  auto bracket = [&](int f, int g) {
    return grad[f][0] * grad[g][2] - grad[f][2] * grad[g][0] + grad[f][1] * grad[g][3] - grad[f][3] * grad[g][1];
  };
  return {bracket(0, 2) - 1.0, bracket(1, 3) - 1.0, bracket(0, 1), bracket(2, 3), bracket(0, 3), bracket(1, 2)};
}

/// Seeded uniform points with 0.1 <= |q| <= 3 and |p_i| <= 3.
inline ParabolicState random_parabolic_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  for (;;) {
    const double q1 = box(rng), q2 = box(rng);
    const double rq = std::hypot(q1, q2);
    if (rq < 0.1 || rq > 3.0) continue;
    return {q1, q2, box(rng), box(rng)};
  }
}

struct CanonicityReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  MomentumConvention convention = MomentumConvention::canonical;
  double bracket_residual_max = 0.0;
  double bracket_residual_mean = 0.0;
  double radius_identity_max = 0.0;  // |x^2 + y^2 - r^2| / max(1, r^2)
};

inline CanonicityReport canonicity_sweep(std::size_t samples, std::uint64_t seed,
                                         MomentumConvention c = MomentumConvention::canonical) {
  CanonicityReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.convention = c;
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto s = random_parabolic_point(rng);
    const double m = poisson_check(s, c).max_abs();
    rep.bracket_residual_max = std::max(rep.bracket_residual_max, m);
    sum += m;
    const auto xy = to_cartesian(s, c);
    const double r = detail::radius_sq(s);
    rep.radius_identity_max =
        std::max(rep.radius_identity_max, std::abs(xy.x * xy.x + xy.y * xy.y - r * r) / std::max(1.0, r * r));
  }
  rep.bracket_residual_mean = samples ? sum / static_cast<double>(samples) : 0.0;
  return rep;
}

/// Compares (H_cartesian - E) r, evaluated through the map, with the parabolic constraint.
struct ConsistencyReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  MomentumConvention convention = MomentumConvention::canonical;
  // (constraint kinetic term) / (mapped kinetic term) at momentum-only points
  double kinetic_ratio_mean = 0.0;
  double kinetic_ratio_spread = 0.0;  // max - min
  double momentum_rescale = 0.0;      // c with mapped(c p) = constraint(p), least squares
  double coulomb_energy_residual_max = 0.0;  // B = 0, zero momenta
  double magnetic_residual_max = 0.0;        // relative, magnetic term alone
  double full_residual_mean = 0.0;           // general points, unscaled momenta
  double full_residual_max = 0.0;
  double rescaled_residual_max = 0.0;  // general points after p -> momentum_rescale * p in the map
  int b9_magnetic_power_printed = 3;
  int b9_magnetic_power_mapped = 2;
};

inline ConsistencyReport check_consistency(const ModelParams& params, std::size_t samples, std::uint64_t seed,
                                           MomentumConvention c = MomentumConvention::canonical) {
  ConsistencyReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.convention = c;
  std::mt19937_64 rng(seed);

  auto mapped = [&](const ParabolicState& s, const ModelParams& m) {
    return (cartesian_hamiltonian(to_cartesian(s, c), m) - m.E) * detail::radius_sq(s);
  };

  const ModelParams kinetic_only{0.0, 0.0, 0.0};
  double rmin = 1e300, rmax = -1e300, rsum = 0.0, num = 0.0, den = 0.0, full_sum = 0.0;
  std::vector<ParabolicState> points;
  points.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) points.push_back(random_parabolic_point(rng));

  for (const auto& s : points) {
    const double target = parabolic_constraint(s, kinetic_only);
    const double got = mapped(s, kinetic_only);
    if (std::abs(got) > 1e-12) {
      const double ratio = target / got;
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
      rsum += ratio;
      num += target * got;
      den += got * got;
    }

    ParabolicState still = s;
    still.p1 = still.p2 = 0.0;
    const ModelParams coulomb{0.0, params.E, params.k};
    rep.coulomb_energy_residual_max =
        std::max(rep.coulomb_energy_residual_max, std::abs(mapped(still, coulomb) - parabolic_constraint(still, coulomb)));

    const double r = detail::radius_sq(s);
    const auto xy = to_cartesian(still, c);
    const double omega = params.B / 2.0;
    const double mag_mapped = 0.5 * omega * omega * (xy.x * xy.x + xy.y * xy.y) * r;
    const double mag_target = params.B * params.B / 8.0 * r * r * r;
    if (mag_target > 0.0)
      rep.magnetic_residual_max = std::max(rep.magnetic_residual_max, std::abs(mag_mapped - mag_target) / mag_target);

    const double full = std::abs(mapped(s, params) - parabolic_constraint(s, params));
    full_sum += full;
    rep.full_residual_max = std::max(rep.full_residual_max, full);
  }
  const double n = static_cast<double>(points.size());
  rep.kinetic_ratio_mean = n > 0 ? rsum / n : 0.0;
  rep.kinetic_ratio_spread = n > 0 ? rmax - rmin : 0.0;
  rep.full_residual_mean = n > 0 ? full_sum / n : 0.0;
  // mapped kinetic is quadratic in p, so mapped(c p) = c^2 mapped(p)
  rep.momentum_rescale = den > 0 ? std::sqrt(num / den) : 0.0;
  for (const auto& s : points) {
    ParabolicState scaled = s;
    scaled.p1 *= rep.momentum_rescale;
    scaled.p2 *= rep.momentum_rescale;
    rep.rescaled_residual_max =
        std::max(rep.rescaled_residual_max, std::abs(mapped(scaled, params) - parabolic_constraint(s, params)));
  }
  return rep;
}

inline nlohmann::ordered_json to_json(const CanonicityReport& r) {
  return {{"seed", r.seed},
          {"sample_count", r.samples},
          {"convention", to_string(r.convention)},
          {"bracket_residual_max", r.bracket_residual_max},
          {"bracket_residual_mean", r.bracket_residual_mean},
          {"radius_identity_max", r.radius_identity_max}};
}

inline nlohmann::ordered_json to_json(const ConsistencyReport& r) {
  return {{"seed", r.seed},
          {"sample_count", r.samples},
          {"convention", to_string(r.convention)},
          {"kinetic_ratio", r.kinetic_ratio_mean},
          {"kinetic_ratio_spread", r.kinetic_ratio_spread},
          {"momentum_rescale", r.momentum_rescale},
          {"coulomb_energy_residual_max", r.coulomb_energy_residual_max},
          {"magnetic_residual_max", r.magnetic_residual_max},
          {"full_residual_mean", r.full_residual_mean},
          {"full_residual_max", r.full_residual_max},
          {"rescaled_residual_max", r.rescaled_residual_max},
          {"b9_magnetic_power_printed", r.b9_magnetic_power_printed},
          {"b9_magnetic_power_mapped", r.b9_magnetic_power_mapped}};
}

}  // namespace zeeman
