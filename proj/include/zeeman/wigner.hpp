#pragma once

// Wigner functions of the two-mode states: star products on the basis family,
// a grid Moyal-product oracle, figure slices, negativity and marginals.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/field.hpp"
#include "zeeman/oscillator_basis.hpp"
#include "zeeman/perturbation.hpp"

namespace zeeman {

/// Diagonal mixture sum_n w_n |n1,n2><n1,n2|, the star-projector image of a FockState.
struct PhaseSpaceState {
  double W = 1.0;
  std::vector<std::pair<FockLabel, double>> weights;  // sorted by label, sum to 1

  static PhaseSpaceState pure(FockLabel level, double W) { return {W, {{level, 1.0}}}; }

  static PhaseSpaceState from_state(const FockState& s) {
    PhaseSpaceState out;
    out.W = s.W;
    const double total = s.norm_squared();
    if (!(total > 0.0)) throw ConfigError("PhaseSpaceState: zero state");
    for (const auto& [l, c] : s.coefficients) out.weights.emplace_back(l, c * c / total);
    return out;
  }

  [[nodiscard]] PhaseSpaceState mode_swapped() const {
    PhaseSpaceState out{W, {}};
    for (const auto& [l, w] : weights) out.weights.emplace_back(l.swapped(), w);
    std::sort(out.weights.begin(), out.weights.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  [[nodiscard]] unsigned max_occupation(int mode) const {
    unsigned m = 0;
    for (const auto& [l, w] : weights) m = std::max(m, mode == 1 ? l.n1 : l.n2);
    return m;
  }
};

/// Unit-integral kernel of occupation n: (-1)^n (1/pi) e^{-u/2} L_n(u), u = 2(W q^2 + p^2/W).
inline double wigner_kernel(unsigned n, double q, double p, double W) {
  const double u = 2.0 * (W * q * q + p * p / W);
  return (n % 2 ? -1.0 : 1.0) / std::numbers::pi * std::exp(-0.5 * u) * laguerre(n, u);
}

namespace detail {

/// Kernels of occupations 0..nmax at one point, sharing one Laguerre recurrence.
inline std::vector<double> kernels_upto(unsigned nmax, double q, double p, double W) {
  const double u = 2.0 * (W * q * q + p * p / W);
  const double env = std::exp(-0.5 * u) / std::numbers::pi;
  std::vector<double> out(nmax + 1);
  double prev = 1.0, cur = 1.0 - u;
  out[0] = env;
  if (nmax >= 1) out[1] = -env * cur;
  for (unsigned k = 1; k < nmax; ++k) {
    const double next = ((2.0 * k + 1.0 - u) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    out[k + 1] = ((k + 1) % 2 ? -1.0 : 1.0) * env * cur;
  }
  return out;
}

}  // namespace detail

/// f_W(q1, p1, q2, p2) = sum w f_n1(q1, p1) f_n2(q2, p2).
inline std::function<double(double, double, double, double)> wigner_function(const PhaseSpaceState& s) {
  const unsigned m1 = s.max_occupation(1), m2 = s.max_occupation(2);
  return [s, m1, m2](double q1, double p1, double q2, double p2) {
    const auto k1 = detail::kernels_upto(m1, q1, p1, s.W);
    const auto k2 = detail::kernels_upto(m2, q2, p2, s.W);
    double acc = 0.0;
    for (const auto& [l, w] : s.weights) acc += w * k1[l.n1] * k2[l.n2];
    return acc;
  };
}

/// f_W with mode 2 frozen at (grid.slice_q2, grid.slice_p2).
inline Field2D wigner_slice(const PhaseSpaceState& s, const GridSpec& grid,
                            const std::map<std::string, std::string>& metadata = {}) {
  grid.validate();
  const unsigned m1 = s.max_occupation(1);
  const auto k2 = detail::kernels_upto(s.max_occupation(2), grid.slice_q2, grid.slice_p2, s.W);
  std::vector<double> mode1_weight(m1 + 1, 0.0);
  for (const auto& [l, w] : s.weights) mode1_weight[l.n1] += w * k2[l.n2];
  Field2D out(grid);
  for (std::size_t i = 0; i < grid.nq; ++i)
    for (std::size_t j = 0; j < grid.np; ++j) {
      const auto k1 = detail::kernels_upto(m1, grid.q(i), grid.p(j), s.W);
      double acc = 0.0;
      for (unsigned n = 0; n <= m1; ++n) acc += mode1_weight[n] * k1[n];
      out(i, j) = acc;
    }
  out.metadata = metadata;
  out.metadata["W"] = format_double(s.W);
  out.metadata["slice"] = format_double(grid.slice_q2) + "," + format_double(grid.slice_p2);
  return out;
}

/// phi_m * phi_n = kappa delta_mn phi_n with kappa = 1/sqrt(2 pi).
struct StarProductResult {
  double scale = 0.0;  // 0 when m != n
  BasisFunction f;

  [[nodiscard]] double operator()(double q, double p) const { return scale == 0.0 ? 0.0 : scale * f(q, p); }
};

inline constexpr double kStarKappa = 0.3989422804014327;  // 1/sqrt(2 pi)

inline StarProductResult star_product_1mode(unsigned m, unsigned n, double W) {
  return {m == n ? kStarKappa : 0.0, BasisFunction{n, W}};
}

// ---------------------------------------------------------------------------
// Grid Moyal product.

enum class MoyalMethod { weyl_kernel, bopp_series };

struct MoyalOptions {
  MoyalMethod method = MoyalMethod::weyl_kernel;
  unsigned bopp_order = 12;
  double bopp_term_tol = 1e-10;
};

namespace detail {

using cplx = std::complex<double>;

/// Weyl symbol -> position kernel on the even q nodes, compose, -> symbol.
/// Needs an odd node count in q and a uniform grid.
inline ComplexField2D weyl_kernel_product(const ComplexField2D& f, const ComplexField2D& g) {
  const GridSpec& grid = f.grid;
  if (grid.nq % 2 == 0) throw ConfigError("moyal_grid_oracle: the Weyl-kernel method needs an odd q node count");
  const std::size_t N = (grid.nq + 1) / 2, np = grid.np;
  const double hq = grid.hq(), hp = grid.hp();
  // phase[d][l] = exp(i p_l s) with s = 2 hq d, d = i - k in [-(N-1), N-1]
  std::vector<cplx> phase((2 * N - 1) * np);
  for (std::size_t d = 0; d < 2 * N - 1; ++d) {
    const double s = 2.0 * hq * (static_cast<double>(d) - static_cast<double>(N - 1));
    for (std::size_t l = 0; l < np; ++l) phase[d * np + l] = std::polar(1.0, grid.p(l) * s);
  }
  auto kernel = [&](const ComplexField2D& sym) {
    std::vector<cplx> K(N * N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx* row = &sym.values[(i + k) * np];
        const cplx* ph = &phase[(i + N - 1 - k) * np];
        cplx acc{};
        for (std::size_t l = 0; l < np; ++l) acc += row[l] * ph[l];
        K[i * N + k] = acc * (hp / (2.0 * std::numbers::pi));
      }
    return K;
  };
  const auto Kf = kernel(f);
  const auto Kg = kernel(g);
  std::vector<cplx> K(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t z = 0; z < N; ++z) {
      const cplx a = Kf[i * N + z] * (2.0 * hq);
      if (a == cplx{}) continue;
      const cplx* gz = &Kg[z * N];
      cplx* out = &K[i * N];
      for (std::size_t k = 0; k < N; ++k) out[k] += a * gz[k];
    }
  ComplexField2D out(grid);
  for (std::size_t m = 0; m < grid.nq; ++m) {
    const std::size_t i_lo = m >= N - 1 ? m - (N - 1) : 0;
    const std::size_t i_hi = std::min(m, N - 1);
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      const std::size_t k = m - i;
      const cplx c = K[i * N + k] * (4.0 * hq);
      const cplx* ph = &phase[(i + N - 1 - k) * np];
      cplx* row = &out.values[m * np];
      for (std::size_t l = 0; l < np; ++l) row[l] += c * std::conj(ph[l]);
    }
  }
  return out;
}

/// Fornberg weights for the m-th derivative at z from nodes x.
inline std::vector<double> fornberg(double z, const std::vector<double>& x, unsigned m) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const unsigned mn = static_cast<unsigned>(std::min<std::size_t>(i, m));
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (unsigned k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (unsigned k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

/// d-th derivative along one axis (0 = q, 1 = p) with a (d + 5)-point stencil,
/// shifted inward at the edges. Results below the rounding floor of the
/// stencil are set to zero, so polynomial inputs terminate cleanly.
inline ComplexField2D axis_derivative(const ComplexField2D& f, int axis, unsigned d) {
  if (d == 0) return f;
  const GridSpec& g = f.grid;
  const std::size_t n = axis == 0 ? g.nq : g.np;
  const std::size_t width = std::min<std::size_t>(d + 5, n);
  if (width <= d) throw NonDifferentiable("moyal_grid_oracle: grid too small for derivative order " + std::to_string(d));
  const double h = axis == 0 ? g.hq() : g.hp();
  ComplexField2D out(g);
  double floor = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t start = c >= width / 2 ? c - width / 2 : 0;
    if (start + width > n) start = n - width;
    std::vector<double> x(width);
    for (std::size_t t = 0; t < width; ++t) x[t] = (static_cast<double>(start + t) - static_cast<double>(c)) * h;
    const auto w = fornberg(0.0, x, d);
    double wsum = 0.0;
    for (double v : w) wsum += std::abs(v);
    floor = std::max(floor, wsum);
    const std::size_t other = axis == 0 ? g.np : g.nq;
    for (std::size_t o = 0; o < other; ++o) {
      cplx acc{};
      for (std::size_t t = 0; t < width; ++t) acc += w[t] * (axis == 0 ? f(start + t, o) : f(o, start + t));
      (axis == 0 ? out(c, o) : out(o, c)) = acc;
    }
  }
  const double noise = 1e-13 * f.max_abs() * floor;
  if (out.max_abs() <= 10.0 * noise) std::fill(out.values.begin(), out.values.end(), cplx{});
  return out;
}

inline ComplexField2D bopp_series_product(const ComplexField2D& f, const ComplexField2D& g, const MoyalOptions& opt) {
  const unsigned K = opt.bopp_order;
  // mixed[a][b] = d_q^a d_p^b of the field
  auto mixed = [K](const ComplexField2D& h) {
    std::vector<std::vector<ComplexField2D>> out(K + 1);
    for (unsigned a = 0; a <= K; ++a) {
      const auto dq = axis_derivative(h, 0, a);
      for (unsigned b = 0; a + b <= K; ++b) out[a].push_back(axis_derivative(dq, 1, b));
    }
    return out;
  };
  const auto F = mixed(f);
  const auto G = mixed(g);
  ComplexField2D sum(f.grid);
  const cplx half_i(0.0, 0.5);
  cplx pref = 1.0;  // (i/2)^k / k!
  int small_in_a_row = 0;
  for (unsigned k = 0; k <= K; ++k) {
    if (k > 0) pref *= half_i / static_cast<double>(k);
    ComplexField2D term(f.grid);
    double binom = 1.0;
    for (unsigned j = 0; j <= k; ++j) {
      if (j > 0) binom = binom * (k - j + 1) / j;
      const double sign = j % 2 ? -1.0 : 1.0;
      const auto& fd = F[k - j][j];
      const auto& gd = G[j][k - j];
      for (std::size_t t = 0; t < term.values.size(); ++t) term.values[t] += sign * binom * fd.values[t] * gd.values[t];
    }
    for (auto& v : term.values) v *= pref;
    for (std::size_t t = 0; t < sum.values.size(); ++t) sum.values[t] += term.values[t];
    const double tmax = term.max_abs();
    if (k > 0 && tmax <= opt.bopp_term_tol * std::max(sum.max_abs(), 1e-300)) {
      if (++small_in_a_row == 2) return sum;
    } else {
      small_in_a_row = 0;
    }
  }
  throw NonConvergence("moyal_grid_oracle: Bopp series terms did not fall below " + format_double(opt.bopp_term_tol) +
                       " by order " + std::to_string(K));
}

inline double boundary_max(const ComplexField2D& f) {
  const GridSpec& g = f.grid;
  double m = 0.0;
  for (std::size_t i = 0; i < g.nq; ++i) m = std::max({m, std::abs(f(i, 0)), std::abs(f(i, g.np - 1))});
  for (std::size_t j = 0; j < g.np; ++j) m = std::max({m, std::abs(f(0, j)), std::abs(f(g.nq - 1, j))});
  return m;
}

}  // namespace detail

/// Moyal product of two sampled fields on a shared grid. The Weyl-kernel
/// method needs both inputs decayed on the boundary (1e-12 of peak).
inline ComplexField2D moyal_grid_oracle(const ComplexField2D& f, const ComplexField2D& g, const MoyalOptions& opt = {}) {
  if (f.grid.nq != g.grid.nq || f.grid.np != g.grid.np || f.grid.q_min != g.grid.q_min || f.grid.q_max != g.grid.q_max ||
      f.grid.p_min != g.grid.p_min || f.grid.p_max != g.grid.p_max)
    throw ConfigError("moyal_grid_oracle: fields must share a grid");
  ComplexField2D out;
  if (opt.method == MoyalMethod::bopp_series) {
    out = detail::bopp_series_product(f, g, opt);
    out.metadata["method"] = "bopp-series";
  } else {
    for (const auto* h : {&f, &g})
      if (detail::boundary_max(*h) > 1e-12 * h->max_abs())
        throw DomainTooSmall("moyal_grid_oracle: input has not decayed on the grid boundary");
    out = detail::weyl_kernel_product(f, g);
    out.metadata["method"] = "weyl-kernel";
  }
  return out;
}

inline ComplexField2D moyal_grid_oracle(const Field2D& f, const Field2D& g, const MoyalOptions& opt = {}) {
  auto lift = [](const Field2D& r) {
    ComplexField2D z(r.grid);
    for (std::size_t t = 0; t < r.values.size(); ++t) z.values[t] = r.values[t];
    return z;
  };
  return moyal_grid_oracle(lift(f), lift(g), opt);
}

/// Moyal product of closed-form functions, reported on `out_grid`. Inputs are
/// sampled on a padded copy of the grid (same spacing) grown until both have
/// decayed to 1e-16 of peak on its edge, so truncation never reaches the output.
template <class F, class G>
ComplexField2D moyal_grid_oracle(F&& f, G&& g, const GridSpec& out_grid) {
  out_grid.validate();
  const double hq = out_grid.hq(), hp = out_grid.hp();
  std::size_t pad_q = 0, pad_p = 0;
  auto build = [&](std::size_t aq, std::size_t ap) {
    GridSpec gpad = out_grid;
    gpad.q_min = out_grid.q_min - static_cast<double>(aq) * hq;
    gpad.p_min = out_grid.p_min - static_cast<double>(ap) * hp;
    gpad.nq = out_grid.nq + 2 * aq;
    gpad.np = out_grid.np + 2 * ap;
    if (gpad.nq % 2 == 0) ++gpad.nq;
    gpad.q_max = gpad.q_min + static_cast<double>(gpad.nq - 1) * hq;
    gpad.p_max = gpad.p_min + static_cast<double>(gpad.np - 1) * hp;
    return gpad;
  };
  auto sample_c = [](const GridSpec& gs, auto& fn) {
    return sample<std::complex<double>>(gs, [&](double q, double p) { return std::complex<double>(fn(q, p)); });
  };
  for (int iter = 0;; ++iter) {
    const GridSpec gpad = build(pad_q, pad_p);
    const auto fs = sample_c(gpad, f);
    const auto gs = sample_c(gpad, g);
    bool grow_q = false, grow_p = false;
    for (const auto* h : {&fs, &gs}) {
      const double peak = h->max_abs();
      for (std::size_t j = 0; j < gpad.np; ++j)
        grow_q |= std::max(std::abs((*h)(0, j)), std::abs((*h)(gpad.nq - 1, j))) > 1e-16 * peak;
      for (std::size_t i = 0; i < gpad.nq; ++i)
        grow_p |= std::max(std::abs((*h)(i, 0)), std::abs((*h)(i, gpad.np - 1))) > 1e-16 * peak;
    }
    if (!grow_q && !grow_p) {
      // p-transform period must exceed the q extent; x spacing must resolve the p extent
      const double q_span = gpad.q_max - gpad.q_min;
      const double p_extent = std::max(std::abs(gpad.p_min), std::abs(gpad.p_max));
      if (q_span >= std::numbers::pi / hp || p_extent >= std::numbers::pi / (4.0 * hq))
        throw DomainTooSmall("moyal_grid_oracle: grid spacing too coarse for the decay length of the inputs");
      auto prod = detail::weyl_kernel_product(fs, gs);
      ComplexField2D out(out_grid);
      for (std::size_t i = 0; i < out_grid.nq; ++i)
        for (std::size_t j = 0; j < out_grid.np; ++j) out(i, j) = prod(i + pad_q, j + pad_p);
      out.metadata["method"] = "weyl-kernel";
      out.metadata["padded_q"] = format_double(gpad.q_min) + "," + format_double(gpad.q_max);
      out.metadata["padded_p"] = format_double(gpad.p_min) + "," + format_double(gpad.p_max);
      return out;
    }
    if (iter > 60) throw DomainTooSmall("moyal_grid_oracle: inputs do not decay");
    if (grow_q) pad_q += std::max<std::size_t>(4, out_grid.nq / 10);
    if (grow_p) pad_p += std::max<std::size_t>(4, out_grid.np / 10);
  }
}

/// max |oracle(phi_n * phi_m) - kappa delta phi_n| / max |phi_n| on the grid.
inline double star_projector_error(unsigned n, unsigned m, double W,
                                   const GridSpec& grid = GridSpec::square(-6.0, 6.0, 201)) {
  const BasisFunction fn{n, W}, fm{m, W};
  const auto prod = moyal_grid_oracle(fn, fm, grid);
  const auto expected = star_product_1mode(n, m, W);
  double diff = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < grid.nq; ++i)
    for (std::size_t j = 0; j < grid.np; ++j) {
      diff = std::max(diff, std::abs(prod(i, j) - expected(grid.q(i), grid.p(j))));
      peak = std::max(peak, std::abs(kStarKappa * fn(grid.q(i), grid.p(j))));
    }
  return diff / peak;
}

/// Oracle cross-check of a slice: mode 1 assembled from grid star products
/// phi_n * phi_n (which equal the unit kernels) instead of the closed form.
struct SliceCheck {
  double max_imag = 0.0;
  double max_abs_diff = 0.0;  // against the closed-form slice, relative to its peak
  std::size_t points = 0;
};

inline SliceCheck slice_oracle_check(const PhaseSpaceState& s, const GridSpec& requested) {
  const unsigned m1 = s.max_occupation(1);
  // cross-check grid: spacing fine enough for the decay length of phi_m1 at this W
  const double u_edge = 60.0 + 8.0 * m1;
  const double q_ext = std::sqrt(u_edge / (2.0 * s.W)), p_ext = std::sqrt(u_edge * s.W / 2.0);
  const double hq = std::min(requested.hq(), std::numbers::pi / (4.0 * 1.25 * p_ext));
  const double span = 2.0 * std::max({q_ext, std::abs(requested.q_min), std::abs(requested.q_max)});
  const double hp = std::min(requested.hp(), std::numbers::pi / (1.25 * span));
  GridSpec g = requested;
  g.nq = static_cast<std::size_t>(std::ceil((requested.q_max - requested.q_min) / hq)) + 1;
  g.np = static_cast<std::size_t>(std::ceil((requested.p_max - requested.p_min) / hp)) + 1;
  const auto k2 = detail::kernels_upto(s.max_occupation(2), requested.slice_q2, requested.slice_p2, s.W);
  std::vector<double> mode1_weight(m1 + 1, 0.0);
  for (const auto& [l, w] : s.weights) mode1_weight[l.n1] += w * k2[l.n2];
  ComplexField2D acc(g);
  for (unsigned n = 0; n <= m1; ++n) {
    if (mode1_weight[n] == 0.0) continue;
    const BasisFunction phi{n, s.W};
    const auto prod = moyal_grid_oracle(phi, phi, g);
    for (std::size_t t = 0; t < acc.values.size(); ++t) acc.values[t] += mode1_weight[n] * prod.values[t];
  }
  const auto closed = wigner_slice(s, g);
  SliceCheck out;
  out.points = g.size();
  const double peak = std::max(closed.max_abs(), 1e-300);
  for (std::size_t t = 0; t < acc.values.size(); ++t) {
    out.max_imag = std::max(out.max_imag, std::abs(acc.values[t].imag()));
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(acc.values[t].real() - closed.values[t]) / peak);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Negativity.

struct NegativityOptions {
  double tolerance = 1e-10;
  bool slice = false;  // 2D slice at (slice_q2, slice_p2) instead of the full 4D space
  double slice_q2 = 1.0;
  double slice_p2 = 1.0;
  bool half = false;   // report (integral |f| - 1) / 2
  double u_min_limit = 80.0;
};

struct NegativityResult {
  double eta = 0.0;
  double error_estimate = 0.0;
  double u_max = 0.0;
  double tail_bound = 0.0;
};

namespace detail {

/// integral_U^inf e^{-u/2} sum_k C(n,k) u^k / k! du, which dominates the tail of |e^{-u/2} L_n(u)|.
inline double laguerre_tail_bound(unsigned n, double U) {
  double total = 0.0, binom = 1.0;
  for (unsigned k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    total += binom * std::ldexp(1.0, static_cast<int>(k) + 1) * boost::math::gamma_q(static_cast<double>(k) + 1.0, U / 2.0);
  }
  return total;
}

/// Monomial coefficients (ascending) of sum_n c_n L_n(u), trailing zeros trimmed.
inline std::vector<double> laguerre_to_monomial(const std::vector<double>& c) {
  std::vector<double> a(c.size(), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (c[n] == 0.0) continue;
    double t = 1.0;  // C(n,k) (-1)^k / k!
    for (std::size_t k = 0; k <= n; ++k) {
      a[k] += c[n] * t;
      t *= -static_cast<double>(n - k) / ((k + 1.0) * (k + 1.0));
    }
  }
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  return a;
}

inline double horner(const std::vector<double>& a, double u) {
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
  return acc;
}

/// Sign changes of the polynomial on (lo, hi), ascending. Critical points come
/// from the derivative recursively, so each bracket holds at most one root.
inline std::vector<double> polynomial_sign_changes(const std::vector<double>& a, double lo, double hi) {
  if (a.size() <= 1) return {};
  if (a.size() == 2) {
    const double r = -a[0] / a[1];
    return r > lo && r < hi ? std::vector<double>{r} : std::vector<double>{};
  }
  std::vector<double> da(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) da[k - 1] = static_cast<double>(k) * a[k];
  std::vector<double> pts{lo};
  for (double x : polynomial_sign_changes(da, lo, hi)) pts.push_back(x);
  pts.push_back(hi);
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a0 = pts[k], b0 = pts[k + 1];
    const double fa = horner(a, a0), fb = horner(a, b0);
    if (fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve([&](double u) { return horner(a, u); }, a0, b0, fa, fb,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    out.push_back(0.5 * (r.first + r.second));
  }
  return out;
}

/// integral_0^U e^{-u/2} |sum_n c_n L_n(u)| du, split at the sign changes.
/// On each piece the antiderivative of e^{-u/2} P is -e^{-u/2} Q with
/// Q = sum_j 2^{j+1} P^(j), so the inner integral is exact.
class AbsLaguerreIntegrator {
 public:
  explicit AbsLaguerreIntegrator(double U) : U_(U) {}

  [[nodiscard]] double integrate_abs(const std::vector<double>& c) const {
    const auto a = laguerre_to_monomial(c);
    std::vector<double> Q(a.size(), 0.0), d = a;
    double scale = 2.0;
    while (!d.empty()) {
      for (std::size_t k = 0; k < d.size(); ++k) Q[k] += scale * d[k];
      for (std::size_t k = 1; k < d.size(); ++k) d[k - 1] = static_cast<double>(k) * d[k];
      d.pop_back();
      scale *= 2.0;
    }
    auto anti = [&](double u) { return -std::exp(-0.5 * u) * horner(Q, u); };
    double total = 0.0, lo = 0.0, a_lo = anti(0.0);
    auto roots = polynomial_sign_changes(a, 0.0, U_);
    roots.push_back(U_);
    for (double hi : roots) {
      const double a_hi = anti(hi);
      if (hi > lo) total += std::abs(a_hi - a_lo);
      lo = hi;
      a_lo = a_hi;
    }
    return total;
  }

 private:
  double U_;
};

inline std::vector<double> laguerre_values(unsigned nmax, double u) {
  std::vector<double> out(nmax + 1);
  out[0] = 1.0;
  if (nmax >= 1) out[1] = 1.0 - u;
  for (unsigned k = 1; k < nmax; ++k) out[k + 1] = ((2.0 * k + 1.0 - u) * out[k] - k * out[k - 1]) / (k + 1.0);
  return out;
}

}  // namespace detail

namespace detail {

/// Global adaptive Gauss-Kronrod over the given breakpoints: the piece with the
/// largest error estimate is bisected until the total is below `abs_tol`.
template <class F>
std::pair<double, double> global_adaptive_gk(F& f, const std::vector<double>& cuts, double abs_tol,
                                             std::size_t max_pieces = 4000) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Piece {
    double a, b, value, err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    const double v = GK::integrate(f, a, b, 0, 0.0, &err);
    return Piece{a, b, v, err};
  };
  std::priority_queue<Piece> heap;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k]) heap.push(eval(cuts[k], cuts[k + 1]));
  auto err_sum = [&] {
    auto copy = heap;
    double e = 0.0;
    for (; !copy.empty(); copy.pop()) e += copy.top().err;
    return e;
  };
  double err = err_sum();
  while (err > abs_tol && heap.size() < max_pieces) {
    const Piece worst = heap.top();
    if (worst.b - worst.a < 1e-12 * std::max(1.0, std::abs(worst.b))) break;
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const Piece l = eval(worst.a, m), r = eval(m, worst.b);
    heap.push(l);
    heap.push(r);
    err += l.err + r.err - worst.err;
  }
  double value = 0.0;
  err = 0.0;
  for (; !heap.empty(); heap.pop()) {
    value += heap.top().value;
    err += heap.top().err;
  }
  return {value, err};
}

}  // namespace detail

/// eta = integral |f_W| - 1 over phase space. With u = 2(W q^2 + p^2/W) per mode,
/// dq dp = (pi/2) du, so the 4D integral reduces to
/// (1/4) integral e^{-(u1+u2)/2} |sum w (-1)^(n1+n2) L_n1(u1) L_n2(u2)| du1 du2.
inline NegativityResult negativity(const PhaseSpaceState& s, const NegativityOptions& opt = {}) {
  if (!(opt.tolerance > 0.0)) throw ConfigError("negativity: tolerance must be positive");
  double wsum = 0.0;
  for (const auto& [l, w] : s.weights) {
    if (w < 0.0) throw ConfigError("negativity: negative mixture weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ConfigError("negativity: weights must sum to 1");

  const unsigned m1 = s.max_occupation(1), m2 = s.max_occupation(2);
  NegativityResult res;

  if (opt.slice) {
    // 2D: mode 2 frozen; normalize by the slice integral Z = sum w f_n2(q2, p2).
    const auto k2 = detail::kernels_upto(m2, opt.slice_q2, opt.slice_p2, s.W);
    std::vector<double> c(m1 + 1, 0.0);
    double Z = 0.0;
    for (const auto& [l, w] : s.weights) {
      c[l.n1] += w * k2[l.n2] * (l.n1 % 2 ? -1.0 : 1.0);
      Z += w * k2[l.n2];
    }
    if (std::abs(Z) < 1e-300) throw ToleranceNotMet("negativity: slice integral vanishes");
    double U = opt.u_min_limit, tail = 0.0;
    for (;; U += 10.0) {
      tail = 0.0;
      for (unsigned n = 0; n <= m1; ++n) tail += std::abs(c[n]) * detail::laguerre_tail_bound(n, U);
      tail *= 0.5 / std::abs(Z);
      if (tail < 0.01 * opt.tolerance || U > 400.0) break;
    }
    const detail::AbsLaguerreIntegrator integ(U);
    // (pi/2) * (1/pi) = 1/2
    const double total = 0.5 * integ.integrate_abs(c) / std::abs(Z);
    res.eta = total - 1.0;
    res.u_max = U;
    res.tail_bound = tail;
    res.error_estimate = tail;
    if (res.eta < 0.0 && res.eta > -(res.error_estimate + 1e-12)) res.eta = 0.0;
    if (opt.half) res.eta *= 0.5;
    return res;
  }

  // Upper limit from the envelope bound on both tails.
  double U = opt.u_min_limit, tail = 0.0;
  for (;; U += 10.0) {
    tail = 0.0;
    for (const auto& [l, w] : s.weights) {
      const double f1 = 2.0 * std::pow(3.0, l.n1), f2 = 2.0 * std::pow(3.0, l.n2);
      tail += w * (detail::laguerre_tail_bound(l.n1, U) * f2 + f1 * detail::laguerre_tail_bound(l.n2, U));
    }
    tail *= 0.25;
    if (tail < 0.01 * opt.tolerance || U > 400.0) break;
  }
  if (tail >= 0.01 * opt.tolerance) throw ToleranceNotMet("negativity: tail bound above tolerance at u = 400");

  const detail::AbsLaguerreIntegrator inner(U);
  auto coefficients = [&](double u2) {
    const auto l2 = detail::laguerre_values(m2, u2);
    std::vector<double> c(m1 + 1, 0.0);
    for (const auto& [l, w] : s.weights) c[l.n1] += w * ((l.n1 + l.n2) % 2 ? -1.0 : 1.0) * l2[l.n2];
    return c;
  };
  auto h = [&](double u2) { return std::exp(-0.5 * u2) * inner.integrate_abs(coefficients(u2)); };

  // Outer breakpoints: h is analytic between the u2 where the number of inner
  // sign changes jumps (a root entering at u1 = 0 or a double root splitting).
  auto count = [&](double u2) {
    return detail::polynomial_sign_changes(detail::laguerre_to_monomial(coefficients(u2)), 0.0, U).size();
  };
  std::vector<double> cuts{0.0};
  std::function<void(double, double, std::size_t, std::size_t)> split = [&](double lo, double hi, std::size_t clo,
                                                                           std::size_t chi) {
    if (clo == chi) return;
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-13 * std::max(1.0, hi)) {
      cuts.push_back(mid);
      return;
    }
    const std::size_t cm = count(mid);
    split(lo, mid, clo, cm);
    split(mid, hi, cm, chi);
  };
  constexpr double kScan = 0.05;
  double prev_u = 0.0;
  std::size_t prev_c = count(0.0);
  for (double u = kScan; u <= U + 0.5 * kScan; u += kScan) {
    const double uu = std::min(u, U);
    const std::size_t c = count(uu);
    split(prev_u, uu, prev_c, c);
    prev_u = uu;
    prev_c = c;
  }
  // P(0; u2) changing sign also moves a root through u1 = 0 when P has no u1 dependence
  std::vector<double> c0(m2 + 1, 0.0);
  for (const auto& [l, w] : s.weights) c0[l.n2] += w * ((l.n1 + l.n2) % 2 ? -1.0 : 1.0);
  for (double r : detail::polynomial_sign_changes(detail::laguerre_to_monomial(c0), 0.0, U)) cuts.push_back(r);
  cuts.push_back(U);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-9; }), cuts.end());
  cuts.back() = U;

  const auto [total, err_total] = detail::global_adaptive_gk(h, cuts, 4.0 * 0.1 * opt.tolerance);
  res.eta = 0.25 * total - 1.0;
  res.error_estimate = 0.25 * err_total + tail;
  // nonnegative states land within rounding of zero
  if (res.eta < 0.0 && res.eta > -(res.error_estimate + 1e-12)) res.eta = 0.0;
  res.u_max = U;
  res.tail_bound = tail;
  if (res.error_estimate > opt.tolerance)
    throw ToleranceNotMet("negativity: error estimate " + format_double(res.error_estimate) + " above tolerance " +
                          format_double(opt.tolerance));
  if (opt.half) res.eta *= 0.5;
  return res;
}

/// Printed negativity tables (B = 1 and B = 0.1).
inline std::optional<double> paper_negativity(FockLabel level, double B) {
  static const std::map<FockLabel, double> b1{{{0, 0}, 0.14345}, {{0, 1}, 0.32645}, {{1, 0}, 0.32645},
                                              {{1, 1}, 0.45786}, {{2, 0}, 0.45786}, {{0, 2}, 0.45786}};
  static const std::map<FockLabel, double> b01{{{0, 0}, 0.0034}, {{1, 0}, 0.0562}, {{0, 1}, 0.0562},
                                               {{1, 1}, 0.0635}, {{2, 0}, 0.0635}, {{0, 2}, 0.0635}};
  const std::map<FockLabel, double>* table = B == 1.0 ? &b1 : (B == 0.1 ? &b01 : nullptr);
  if (!table) return std::nullopt;
  const auto it = table->find(level);
  if (it == table->end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Marginals.

enum class Axis { q, p };

namespace detail {

/// Orthonormal Hermite function h_n(x).
inline double hermite_function(unsigned n, double x) {
  double prev = 0.0, cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  for (unsigned k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace detail

/// Density of q_mode or p_mode: the kernels integrate to |psi_n|^2, and the other mode to 1.
inline std::function<double(double)> marginal(const PhaseSpaceState& s, Axis axis, int mode) {
  if (mode != 1 && mode != 2) throw ConfigError("marginal: mode must be 1 or 2");
  std::map<unsigned, double> w;
  for (const auto& [l, v] : s.weights) w[mode == 1 ? l.n1 : l.n2] += v;
  const double W = s.W;
  return [w, W, axis](double x) {
    double acc = 0.0;
    for (const auto& [n, v] : w) {
      if (axis == Axis::q) {
        const double h = detail::hermite_function(n, std::sqrt(W) * x);
        acc += v * std::sqrt(W) * h * h;
      } else {
        const double h = detail::hermite_function(n, x / std::sqrt(W));
        acc += v * h * h / std::sqrt(W);
      }
    }
    return acc;
  };
}

// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const NegativityResult& r) {
  return {{"eta", r.eta}, {"error_estimate", r.error_estimate}, {"u_max", r.u_max}, {"tail_bound", r.tail_bound}};
}

}  // namespace zeeman
