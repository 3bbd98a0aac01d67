#pragma once

// Exact coefficients for the ladder algebra: 64-bit rationals and
// Q-linear combinations of square roots of square-free integers.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zeeman {

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    assign(static_cast<__int128>(n), static_cast<__int128>(d));
  }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] bool is_zero() const { return num_ == 0; }
  [[nodiscard]] bool is_integer() const { return den_ == 1; }

  [[nodiscard]] long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }
  [[nodiscard]] double to_double() const { return static_cast<double>(to_long_double()); }

  Rational operator-() const { return from_wide(-static_cast<__int128>(num_), den_); }

  friend Rational operator+(const Rational& x, const Rational& y) {
    return from_wide(static_cast<__int128>(x.num_) * y.den_ + static_cast<__int128>(y.num_) * x.den_,
                     static_cast<__int128>(x.den_) * y.den_);
  }
  friend Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
  friend Rational operator*(const Rational& x, const Rational& y) {
    // Cross-reduce first so intermediate products stay small.
    const std::int64_t g1 = std::gcd(x.num_, y.den_);
    const std::int64_t g2 = std::gcd(y.num_, x.den_);
    const __int128 n = static_cast<__int128>(x.num_ / (g1 ? g1 : 1)) * (y.num_ / (g2 ? g2 : 1));
    const __int128 d = static_cast<__int128>(x.den_ / (g2 ? g2 : 1)) * (y.den_ / (g1 ? g1 : 1));
    return from_wide(n, d);
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("Rational: division by zero");
    return x * from_wide(y.den_, y.num_);
  }
  Rational& operator+=(const Rational& y) { return *this = *this + y; }
  Rational& operator-=(const Rational& y) { return *this = *this - y; }
  Rational& operator*=(const Rational& y) { return *this = *this * y; }
  Rational& operator/=(const Rational& y) { return *this = *this / y; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
    return static_cast<__int128>(x.num_) * y.den_ <=> static_cast<__int128>(y.num_) * x.den_;
  }

  [[nodiscard]] std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static Rational from_wide(__int128 n, __int128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  void assign(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n == 0) d = 1;
    num_ = narrow(n);
    den_ = narrow(d);
  }

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational: 64-bit overflow");
    return static_cast<std::int64_t>(v);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(x, y, &out)) throw std::overflow_error("surd radicand overflow");
  return out;
}

/// Splits n = outside^2 * inside with inside square-free.
inline std::pair<std::uint64_t, std::uint64_t> square_split(std::uint64_t n) {
  std::uint64_t outside = 1;
  std::uint64_t inside = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      outside *= p;
      n /= p * p;
    }
    if (n % p == 0) {
      inside *= p;
      n /= p;
    }
  }
  return {outside, checked_mul(inside, n)};
}

inline void accumulate_prime_powers(std::uint64_t n, std::map<std::uint64_t, unsigned>& powers) {
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++powers[p];
      n /= p;
    }
  }
  if (n > 1) ++powers[n];
}

}  // namespace detail

/// Exact number sum_i c_i * sqrt(r_i) with rational c_i and distinct square-free r_i.
class Surd {
 public:
  using Term = std::pair<std::uint64_t, Rational>;

  Surd() = default;
  Surd(std::int64_t n) : Surd(Rational(n)) {}  // NOLINT(google-explicit-constructor)
  Surd(Rational r) {                            // NOLINT(google-explicit-constructor)
    if (!r.is_zero()) terms_.emplace_back(1, r);
  }
  Surd(Rational c, std::uint64_t radicand) { add_term(radicand, c); }

  /// sqrt(n), with square factors pulled out.
  static Surd sqrt_of(std::uint64_t n) {
    if (n == 0) return {};
    const auto [outside, inside] = detail::square_split(n);
    return Surd(Rational(static_cast<std::int64_t>(outside)), inside);
  }

  /// sqrt(f_1 * f_2 * ...), factored term by term so the product never materializes.
  static Surd sqrt_of_product(std::span<const std::uint64_t> factors) {
    std::map<std::uint64_t, unsigned> powers;
    for (std::uint64_t f : factors) {
      if (f == 0) return {};
      detail::accumulate_prime_powers(f, powers);
    }
    std::uint64_t outside = 1;
    std::uint64_t inside = 1;
    for (const auto& [p, e] : powers) {
      for (unsigned i = 0; i < e / 2; ++i) outside = detail::checked_mul(outside, p);
      if (e % 2) inside = detail::checked_mul(inside, p);
    }
    return Surd(Rational(static_cast<std::int64_t>(outside)), inside);
  }

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 1); }
  [[nodiscard]] Rational rational_part() const {
    return (!terms_.empty() && terms_[0].first == 1) ? terms_[0].second : Rational{};
  }
  /// Coefficient of sqrt(radicand); radicand must be square-free.
  [[nodiscard]] Rational coefficient_of(std::uint64_t radicand) const {
    for (const auto& [r, c] : terms_)
      if (r == radicand) return c;
    return {};
  }

  [[nodiscard]] long double to_long_double() const {
    long double acc = 0.0L;
    for (const auto& [r, c] : terms_) acc += c.to_long_double() * std::sqrt(static_cast<long double>(r));
    return acc;
  }
  [[nodiscard]] double to_double() const { return static_cast<double>(to_long_double()); }

  Surd operator-() const {
    Surd out = *this;
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
  }
  Surd& operator+=(const Surd& y) {
    for (const auto& [r, c] : y.terms_) add_term(r, c);
    return *this;
  }
  Surd& operator-=(const Surd& y) { return *this += -y; }
  Surd& operator*=(const Surd& y) { return *this = *this * y; }
  Surd& operator/=(const Rational& y) {
    for (auto& t : terms_) t.second /= y;
    return *this;
  }

  friend Surd operator+(Surd x, const Surd& y) { return x += y; }
  friend Surd operator-(Surd x, const Surd& y) { return x -= y; }
  friend Surd operator/(Surd x, const Rational& y) { return x /= y; }
  friend Surd operator*(const Surd& x, const Surd& y) {
    Surd out;
    for (const auto& [rx, cx] : x.terms_) {
      for (const auto& [ry, cy] : y.terms_) {
        // sqrt(rx) sqrt(ry) = g sqrt((rx/g)(ry/g)) for square-free rx, ry with g = gcd.
        const std::uint64_t g = std::gcd(rx, ry);
        const std::uint64_t r = detail::checked_mul(rx / g, ry / g);
        out.add_term(r, cx * cy * Rational(static_cast<std::int64_t>(g)));
      }
    }
    return out;
  }

  friend bool operator==(const Surd&, const Surd&) = default;

  /// Canonical text such as "-18 - 21*sqrt(2) - 25*sqrt(10)".
  [[nodiscard]] std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& [r, c] = terms_[i];
      const bool negative = c < Rational(0);
      const Rational mag = negative ? -c : c;
      if (i == 0) {
        if (negative) out += "-";
      } else {
        out += negative ? " - " : " + ";
      }
      if (r == 1) {
        out += mag.str();
      } else {
        if (mag != Rational(1)) out += mag.str() + "*";
        out += "sqrt(" + std::to_string(r) + ")";
      }
    }
    return out;
  }
  friend std::ostream& operator<<(std::ostream& os, const Surd& s) { return os << s.str(); }

 private:
  void add_term(std::uint64_t radicand, const Rational& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), radicand,
                               [](const Term& t, std::uint64_t r) { return t.first < r; });
    if (it != terms_.end() && it->first == radicand) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    } else {
      terms_.insert(it, Term{radicand, c});
    }
  }

  std::vector<Term> terms_;  // sorted by radicand, nonzero coefficients
};

/// Arithmetic hooks shared by the exact and floating-point coefficient types.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static double from_int(std::int64_t n) { return static_cast<double>(n); }
  static double sqrt_of_product(std::span<const std::uint64_t> factors) {
    long double p = 1.0L;
    for (std::uint64_t f : factors) p *= static_cast<long double>(f);
    return static_cast<double>(std::sqrt(p));
  }
  static bool is_zero(double x) { return x == 0.0; }
  static double div_int(double x, std::int64_t n) { return x / static_cast<double>(n); }
  static double to_double(double x) { return x; }
  static std::string str(double x) { return std::to_string(x); }
};

template <>
struct scalar_traits<Surd> {
  static Surd from_int(std::int64_t n) { return Surd(n); }
  static Surd sqrt_of_product(std::span<const std::uint64_t> factors) { return Surd::sqrt_of_product(factors); }
  static bool is_zero(const Surd& x) { return x.is_zero(); }
  static Surd div_int(const Surd& x, std::int64_t n) { return x / Rational(n); }
  static double to_double(const Surd& x) { return x.to_double(); }
  static std::string str(const Surd& x) { return x.str(); }
};

template <class T>
concept Coefficient = requires(const T& x, std::int64_t n) {
  { scalar_traits<T>::from_int(n) } -> std::convertible_to<T>;
  { scalar_traits<T>::is_zero(x) } -> std::convertible_to<bool>;
  { scalar_traits<T>::to_double(x) } -> std::convertible_to<double>;
  { x + x } -> std::convertible_to<T>;
  { x * x } -> std::convertible_to<T>;
};

}  // namespace zeeman
