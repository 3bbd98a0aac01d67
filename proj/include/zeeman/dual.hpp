#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<T>> gives mixed second
// derivatives, which is what composing two Bopp operators needs.

#include <cmath>
#include <complex>
#include <type_traits>

namespace zeeman {

template <class T>
struct Dual;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Plain numbers that act as constants against a Dual.
template <class U>
concept Constant = std::is_arithmetic_v<U> || is_complex<U>::value;

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value, T derivative) : v(std::move(value)), d(std::move(derivative)) {}
  template <Constant U>
    requires std::is_constructible_v<T, U>
  Dual(U value) : v(value), d() {}  // NOLINT(google-explicit-constructor)
  template <class U>
    requires(!std::is_same_v<U, T> && std::is_constructible_v<T, const U&>)
  explicit Dual(const Dual<U>& o) : v(T(o.v)), d(T(o.d)) {}

  Dual operator-() const { return {-v, -d}; }
  Dual& operator+=(const Dual& y) {
    v += y.v;
    d += y.d;
    return *this;
  }
  Dual& operator-=(const Dual& y) {
    v -= y.v;
    d -= y.d;
    return *this;
  }
  Dual& operator*=(const Dual& y) {
    d = d * y.v + v * y.d;
    v = v * y.v;
    return *this;
  }
  Dual& operator/=(const Dual& y) {
    d = (d * y.v - v * y.d) / (y.v * y.v);
    v = v / y.v;
    return *this;
  }
};

template <class T>
Dual<T> operator+(Dual<T> x, const Dual<T>& y) { return x += y; }
template <class T>
Dual<T> operator-(Dual<T> x, const Dual<T>& y) { return x -= y; }
template <class T>
Dual<T> operator*(Dual<T> x, const Dual<T>& y) { return x *= y; }
template <class T>
Dual<T> operator/(Dual<T> x, const Dual<T>& y) { return x /= y; }

template <class T, Constant U>
Dual<T> operator+(const Dual<T>& x, const U& c) { return {x.v + c, x.d}; }
template <class T, Constant U>
Dual<T> operator+(const U& c, const Dual<T>& x) { return {c + x.v, x.d}; }
template <class T, Constant U>
Dual<T> operator-(const Dual<T>& x, const U& c) { return {x.v - c, x.d}; }
template <class T, Constant U>
Dual<T> operator-(const U& c, const Dual<T>& x) { return {c - x.v, -x.d}; }
template <class T, Constant U>
Dual<T> operator*(const Dual<T>& x, const U& c) { return {x.v * c, x.d * c}; }
template <class T, Constant U>
Dual<T> operator*(const U& c, const Dual<T>& x) { return {c * x.v, c * x.d}; }
template <class T, Constant U>
Dual<T> operator/(const Dual<T>& x, const U& c) { return {x.v / c, x.d / c}; }

template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  const T e = exp(x.v);
  return {e, e * x.d};
}

/// Maps a real scalar type to its complex counterpart, recursively through Dual.
template <class T>
struct complexify {
  using type = std::complex<double>;
};
template <class T>
struct complexify<Dual<T>> {
  using type = Dual<typename complexify<T>::type>;
};
template <class T>
using complexify_t = typename complexify<T>::type;

}  // namespace zeeman
