#pragma once

// Tensor quadrature rules on the (q, p) plane.

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeeman/errors.hpp"

namespace zeeman {

/// One-dimensional rule: sum_i weights[i] f(nodes[i]) approximates the integral over [lo, hi].
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;
};

/// Gauss-Legendre nodes and weights of the given order on [-1, 1], ascending.
inline AxisRule gauss_legendre(unsigned order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  AxisRule rule;
  rule.lo = -1.0;
  rule.hi = 1.0;
  const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(order));  // non-negative zeros
  const int n = static_cast<int>(order);
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  if (order % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

/// Composite Gauss-Legendre: `panels` equal panels of `order` nodes each on [lo, hi].
inline AxisRule gauss_legendre_panels(double lo, double hi, unsigned panels, unsigned order) {
  if (!(hi > lo) || panels == 0) throw std::invalid_argument("gauss_legendre_panels: bad interval");
  const AxisRule ref = gauss_legendre(order);
  AxisRule rule;
  rule.lo = lo;
  rule.hi = hi;
  const double width = (hi - lo) / panels;
  for (unsigned k = 0; k < panels; ++k) {
    const double a = lo + k * width;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      rule.nodes.push_back(a + 0.5 * width * (ref.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * width * ref.weights[i]);
    }
  }
  return rule;
}

/// Gauss-Hermite rule for integrands with a Gaussian envelope exp(-(x/scale)^2).
/// Weights absorb the envelope, so sum_i w_i f(x_i) approximates the plain integral of f.
inline AxisRule gauss_hermite(unsigned order, double scale = 1.0) {
  if (order == 0) throw std::invalid_argument("gauss_hermite: order must be positive");
  // Newton iteration on orthonormal Hermite functions.
  const int n = static_cast<int>(order);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  std::vector<double> x(order), w(order);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  AxisRule rule;
  for (int i = n - 1; i >= 0; --i) {
    rule.nodes.push_back(scale * x[i]);
    rule.weights.push_back(scale * w[i] * std::exp(x[i] * x[i]));
  }
  rule.lo = rule.nodes.front();
  rule.hi = rule.nodes.back();
  return rule;
}

enum class QuadratureKind { legendre_panels, hermite };

/// Tensor-product rule over (q, p).
struct QuadratureRule {
  AxisRule q;
  AxisRule p;
  QuadratureKind kind = QuadratureKind::legendre_panels;
  /// Polynomial degree integrated exactly per axis (per panel for Legendre).
  unsigned exactness_degree = 0;

  /// Gauss-Legendre panels on [lo, hi]^2.
  static QuadratureRule legendre(double lo, double hi, unsigned panels, unsigned order) {
    QuadratureRule r;
    r.q = gauss_legendre_panels(lo, hi, panels, order);
    r.p = r.q;
    r.kind = QuadratureKind::legendre_panels;
    r.exactness_degree = 2 * order - 1;
    return r;
  }

  /// [-8, 8]^2 with 160 nodes per axis.
  static QuadratureRule standard() { return legendre(-8.0, 8.0, 8, 20); }

  /// Gauss-Hermite matched to exp(-2(W q^2 + p^2 / W)), the envelope of a product of two basis functions.
  static QuadratureRule hermite(unsigned order, double W) {
    QuadratureRule r;
    r.q = gauss_hermite(order, 1.0 / std::sqrt(2.0 * W));
    r.p = gauss_hermite(order, std::sqrt(W / 2.0));
    r.kind = QuadratureKind::hermite;
    r.exactness_degree = 2 * order - 1;
    return r;
  }

  [[nodiscard]] std::size_t size() const { return q.nodes.size() * p.nodes.size(); }
};

/// Integral of f(q, p) under the rule; rows are summed before the outer sum.
template <class F>
auto integrate(const QuadratureRule& rule, F&& f) {
  using R = decltype(f(0.0, 0.0));
  R total{};
  for (std::size_t i = 0; i < rule.q.nodes.size(); ++i) {
    R row{};
    for (std::size_t j = 0; j < rule.p.nodes.size(); ++j) row += rule.p.weights[j] * f(rule.q.nodes[i], rule.p.nodes[j]);
    total += rule.q.weights[i] * row;
  }
  return total;
}

}  // namespace zeeman
