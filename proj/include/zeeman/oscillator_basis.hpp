#pragma once

// Laguerre-Gaussian phase-space basis, Bopp-shift star operators and
// quadrature inner products.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "zeeman/dual.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/field.hpp"
#include "zeeman/quadrature.hpp"

namespace zeeman {

/// L_n(x) by the three-term recurrence. Works for any ring type, including Dual.
template <class S>
S laguerre(unsigned n, const S& x) {
  S prev(1.0);
  if (n == 0) return prev;
  S cur = S(1.0) - x;
  for (unsigned k = 1; k < n; ++k) {
    S next = ((2.0 * k + 1.0) - x) * cur;
    next -= static_cast<double>(k) * prev;
    next = next / static_cast<double>(k + 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

enum class BasisForm {
  ladder,         // N_n e^{-u/2} L_n(u), u = 2(W q^2 + p^2/W); solves the star-annihilation condition
  paper_literal,  // N_n e^{-v} L_n(v), v = W q^2 + p^2, as printed
};

namespace detail {

/// integral_0^inf e^{-2v} L_n(v)^2 dv; the integrand is below 1e-40 past v = 60 for the n we use.
inline double laguerre_gauss_moment(unsigned n) {
  const auto rule = gauss_legendre_panels(0.0, 60.0 + 4.0 * n, 24, 20);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double l = laguerre(n, rule.nodes[i]);
    acc += rule.weights[i] * std::exp(-2.0 * rule.nodes[i]) * l * l;
  }
  return acc;
}

inline double cached_laguerre_gauss_moment(unsigned n) {
  static const std::vector<double> table = [] {
    std::vector<double> t;
    for (unsigned k = 0; k <= 32; ++k) t.push_back(laguerre_gauss_moment(k));
    return t;
  }();
  return n < table.size() ? table[n] : laguerre_gauss_moment(n);
}

}  // namespace detail

/// One-mode phase-space function of occupation n.
struct BasisFunction {
  unsigned n = 0;
  double W = 1.0;
  BasisForm form = BasisForm::ladder;

  /// Prefactor making the squared integral 1. The ladder form carries (-1)^n.
  [[nodiscard]] double normalization() const {
    if (form == BasisForm::ladder) return (n % 2 ? -1.0 : 1.0) * std::sqrt(2.0 / std::numbers::pi);
    // dq dp = (pi / sqrt(W)) dv on the ellipses W q^2 + p^2 = v.
    return 1.0 / std::sqrt(std::numbers::pi / std::sqrt(W) * detail::cached_laguerre_gauss_moment(n));
  }

  template <class S>
  S operator()(const S& q, const S& p) const {
    using std::exp;
    if (form == BasisForm::ladder) {
      const S u = 2.0 * (W * q * q + p * p / W);
      return normalization() * (exp(-0.5 * u) * laguerre(n, u));
    }
    const S v = W * q * q + p * p;
    return normalization() * (exp(-v) * laguerre(n, v));
  }
};

inline double phi_eval(const BasisFunction& f, PhasePoint pt) { return f(pt.q, pt.p); }

enum class StarOperator { q, p, annihilation, creation };

inline std::string to_string(StarOperator op) {
  switch (op) {
    case StarOperator::q: return "q*";
    case StarOperator::p: return "p*";
    case StarOperator::annihilation: return "a*";
    case StarOperator::creation: return "a+*";
  }
  return "?";
}

/// Bopp shift applied to a closed-form f(q, p). q* = q + (i/2) d/dp, p* = p - (i/2) d/dq,
/// a* = sqrt(W/2) q* + i p* / sqrt(2W), a+* its conjugate combination.
/// Derivatives are exact (forward-mode dual numbers), so results can be composed.
template <class F>
auto bopp_apply(StarOperator op, F f, double W) {
  return [op, f = std::move(f), W](const auto& q, const auto& p) {
    using C = complexify_t<std::decay_t<decltype(q)>>;
    using D = Dual<C>;
    const std::complex<double> I(0.0, 1.0);
    const C qc(q), pc(p);
    const auto along_q = f(D(qc, C(1.0)), D(pc, C(0.0)));
    const auto along_p = f(D(qc, C(0.0)), D(pc, C(1.0)));
    const C value = C(along_q.v);
    const C q_star = qc * value + (0.5 * I) * C(along_p.d);
    const C p_star = pc * value - (0.5 * I) * C(along_q.d);
    switch (op) {
      case StarOperator::q: return q_star;
      case StarOperator::p: return p_star;
      case StarOperator::annihilation: return std::sqrt(W / 2.0) * q_star + (I / std::sqrt(2.0 * W)) * p_star;
      case StarOperator::creation: break;
    }
    return std::sqrt(W / 2.0) * q_star - (I / std::sqrt(2.0 * W)) * p_star;
  };
}

/// Bopp shift of a sampled field with 4th-order central differences (error O(h^4)).
/// The result lives on the interior grid, two nodes in from each edge.
inline ComplexField2D bopp_apply_sampled(StarOperator op, const ComplexField2D& f, double W) {
  const GridSpec& g = f.grid;
  if (g.nq < 5 || g.np < 5) throw NonDifferentiable("bopp_apply_sampled: need at least 5 nodes per axis");
  GridSpec inner = g;
  inner.nq = g.nq - 4;
  inner.np = g.np - 4;
  inner.q_min = g.q(2);
  inner.q_max = g.q(g.nq - 3);
  inner.p_min = g.p(2);
  inner.p_max = g.p(g.np - 3);
  ComplexField2D out(inner);
  out.metadata = f.metadata;
  const double hq = g.hq(), hp = g.hp();
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t i = 2; i + 2 < g.nq; ++i) {
    for (std::size_t j = 2; j + 2 < g.np; ++j) {
      const auto dq = (f(i - 2, j) - 8.0 * f(i - 1, j) + 8.0 * f(i + 1, j) - f(i + 2, j)) / (12.0 * hq);
      const auto dp = (f(i, j - 2) - 8.0 * f(i, j - 1) + 8.0 * f(i, j + 1) - f(i, j + 2)) / (12.0 * hp);
      const auto q_star = g.q(i) * f(i, j) + 0.5 * I * dp;
      const auto p_star = g.p(j) * f(i, j) - 0.5 * I * dq;
      std::complex<double> v;
      switch (op) {
        case StarOperator::q: v = q_star; break;
        case StarOperator::p: v = p_star; break;
        case StarOperator::annihilation: v = std::sqrt(W / 2.0) * q_star + I / std::sqrt(2.0 * W) * p_star; break;
        case StarOperator::creation: v = std::sqrt(W / 2.0) * q_star - I / std::sqrt(2.0 * W) * p_star; break;
      }
      out(i - 2, j - 2) = v;
    }
  }
  return out;
}

/// Integral of conj(f) g over the plane by tensor quadrature. For Legendre rules the
/// integrand must have decayed to 1e-12 of its peak on the rectangle's edge.
template <class F, class G>
std::complex<double> inner_product(F&& f, G&& g, const QuadratureRule& rule) {
  auto integrand = [&](double q, double p) {
    return std::conj(std::complex<double>(f(q, p))) * std::complex<double>(g(q, p));
  };
  double peak = 0.0;
  std::complex<double> total{};
  for (std::size_t i = 0; i < rule.q.nodes.size(); ++i) {
    std::complex<double> row{};
    for (std::size_t j = 0; j < rule.p.nodes.size(); ++j) {
      const auto v = integrand(rule.q.nodes[i], rule.p.nodes[j]);
      peak = std::max(peak, std::abs(v));
      row += rule.p.weights[j] * v;
    }
    total += rule.q.weights[i] * row;
  }
  if (rule.kind == QuadratureKind::legendre_panels) {
    double edge = 0.0;
    for (double p : rule.p.nodes) edge = std::max({edge, std::abs(integrand(rule.q.lo, p)), std::abs(integrand(rule.q.hi, p))});
    for (double q : rule.q.nodes) edge = std::max({edge, std::abs(integrand(q, rule.p.lo)), std::abs(integrand(q, rule.p.hi))});
    if (edge > 1e-12 * peak)
      throw DomainTooSmall("inner_product: integrand is " + format_double(edge / peak) + " of peak on the boundary");
  }
  return total;
}

/// max |a* phi_0| / max |phi_0| on a grid.
inline double star_annihilation_residual(double W, const GridSpec& grid = GridSpec::square(-6.0, 6.0, 121)) {
  const BasisFunction phi0{0, W};
  const auto a_phi = bopp_apply(StarOperator::annihilation, phi0, W);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.nq; ++i)
    for (std::size_t j = 0; j < grid.np; ++j) {
      num = std::max(num, std::abs(a_phi(grid.q(i), grid.p(j))));
      den = std::max(den, std::abs(phi0(grid.q(i), grid.p(j))));
    }
  return num / den;
}

/// <phi_m, a+* phi_n> as a concrete plane integral, to set beside the formal sqrt(n+1) delta_{m,n+1}.
inline std::complex<double> creation_pairing(unsigned m, unsigned n, double W,
                                             const QuadratureRule& rule = QuadratureRule::standard()) {
  const BasisFunction bra{m, W};
  const auto ket = bopp_apply(StarOperator::creation, BasisFunction{n, W}, W);
  return inner_product(bra, ket, rule);
}

}  // namespace zeeman
