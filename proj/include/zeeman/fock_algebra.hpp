#pragma once

// Two-mode bosonic ladder algebra with exact or floating-point coefficients.
//
// A LadderExpression is a normal-ordered polynomial
//   sum c * (a^dag)^r a^s (b^dag)^t b^u
// keyed by the exponent tuple (r, s, t, u). Normal ordering uses single
// swaps a a^dag -> a^dag a + 1, memoized per mode; FockMatrix is the
// independent truncated-basis oracle that multiplies elementary
// raising/lowering matrices literally.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zeeman/errors.hpp"
#include "zeeman/exact.hpp"

namespace zeeman {

enum class Ladder : std::uint8_t { a, a_dag, b, b_dag };

struct FockLabel {
  unsigned n1 = 0;
  unsigned n2 = 0;

  [[nodiscard]] unsigned total() const { return n1 + n2; }
  [[nodiscard]] FockLabel swapped() const { return {n2, n1}; }
  friend auto operator<=>(const FockLabel&, const FockLabel&) = default;
};

/// Exponents of (a^dag)^a_dag a^a (b^dag)^b_dag b^b.
struct Exponents {
  unsigned a_dag = 0;
  unsigned a = 0;
  unsigned b_dag = 0;
  unsigned b = 0;

  [[nodiscard]] unsigned degree() const { return a_dag + a + b_dag + b; }
  [[nodiscard]] Exponents adjoint() const { return {a, a_dag, b, b_dag}; }
  [[nodiscard]] Exponents mode_swapped() const { return {b_dag, b, a_dag, a}; }
  friend auto operator<=>(const Exponents&, const Exponents&) = default;
};

template <Coefficient T>
struct LadderWord {
  Exponents exponents;
  T coefficient;
};

template <Coefficient T>
class LadderExpression {
 public:
  using coefficient_type = T;
  using container_type = std::map<Exponents, T>;

  LadderExpression() = default;

  static LadderExpression identity(T c = scalar_traits<T>::from_int(1)) { return word({}, std::move(c)); }
  static LadderExpression word(Exponents e, T c = scalar_traits<T>::from_int(1)) {
    LadderExpression out;
    out.add(e, std::move(c));
    return out;
  }
  static LadderExpression factor(Ladder l) {
    switch (l) {
      case Ladder::a: return word({0, 1, 0, 0});
      case Ladder::a_dag: return word({1, 0, 0, 0});
      case Ladder::b: return word({0, 0, 0, 1});
      case Ladder::b_dag: return word({0, 0, 1, 0});
    }
    return {};
  }

  [[nodiscard]] const container_type& terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] bool empty() const { return terms_.empty(); }

  [[nodiscard]] std::vector<LadderWord<T>> words() const {
    std::vector<LadderWord<T>> out;
    out.reserve(terms_.size());
    for (const auto& [e, c] : terms_) out.push_back({e, c});
    return out;
  }

  [[nodiscard]] T coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? T{} : it->second;
  }

  /// Largest total degree over all words.
  [[nodiscard]] unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e.degree());
    return d;
  }

  void add(const Exponents& e, T c) {
    if (scalar_traits<T>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
    }
  }

  LadderExpression& operator+=(const LadderExpression& y) {
    for (const auto& [e, c] : y.terms_) add(e, c);
    return *this;
  }
  LadderExpression& operator-=(const LadderExpression& y) {
    for (const auto& [e, c] : y.terms_) add(e, scalar_traits<T>::from_int(-1) * c);
    return *this;
  }
  LadderExpression& operator*=(const T& s) {
    if (scalar_traits<T>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c = c * s;
    return *this;
  }

  friend LadderExpression operator+(LadderExpression x, const LadderExpression& y) { return x += y; }
  friend LadderExpression operator-(LadderExpression x, const LadderExpression& y) { return x -= y; }
  friend LadderExpression operator*(LadderExpression x, const T& s) { return x *= s; }
  friend LadderExpression operator*(const T& s, LadderExpression x) { return x *= s; }
  friend bool operator==(const LadderExpression&, const LadderExpression&) = default;

  [[nodiscard]] std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    auto power = [](std::string_view sym, unsigned k) -> std::string {
      if (k == 0) return "";
      return k == 1 ? std::string(sym) : std::string(sym) + "^" + std::to_string(k);
    };
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += "(" + scalar_traits<T>::str(c) + ")";
      for (auto s : {power("a+", e.a_dag), power("a", e.a), power("b+", e.b_dag), power("b", e.b)})
        if (!s.empty()) out += " " + s;
    }
    return out;
  }

 private:
  container_type terms_;
};

namespace detail {

// Single-mode normal ordering of a word over {'+' = creation, '-' = annihilation}.
// Result maps (creations, annihilations) -> integer coefficient.
using ModeExpansion = std::map<std::pair<unsigned, unsigned>, std::int64_t>;

inline const ModeExpansion& normal_order_mode(const std::string& word) {
  thread_local std::unordered_map<std::string, ModeExpansion> memo;
  if (auto it = memo.find(word); it != memo.end()) return it->second;

  ModeExpansion out;
  const auto pos = word.find("-+");
  if (pos == std::string::npos) {
    const auto creations = static_cast<unsigned>(std::count(word.begin(), word.end(), '+'));
    out[{creations, static_cast<unsigned>(word.size()) - creations}] = 1;
  } else {
    // a a^dag = a^dag a + 1
    std::string swapped = word;
    std::swap(swapped[pos], swapped[pos + 1]);
    std::string contracted = word;
    contracted.erase(pos, 2);
    for (const auto* part : {&normal_order_mode(swapped), &normal_order_mode(contracted)})
      for (const auto& [k, c] : *part) out[k] += c;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  }
  return memo.emplace(word, std::move(out)).first->second;
}

/// Normal-ordered expansion of (a^dag)^r1 a^s1 (a^dag)^r2 a^s2.
inline ModeExpansion mode_product(unsigned r1, unsigned s1, unsigned r2, unsigned s2) {
  const auto& middle = normal_order_mode(std::string(s1, '-') + std::string(r2, '+'));
  ModeExpansion out;
  for (const auto& [k, c] : middle) out[{r1 + k.first, k.second + s2}] += c;
  return out;
}

}  // namespace detail

/// Normal-ordered expansion of an arbitrary product of elementary ladder factors.
template <Coefficient T>
LadderExpression<T> normal_order(std::span<const Ladder> factors) {
  std::string mode_a;
  std::string mode_b;
  for (Ladder l : factors) {
    switch (l) {
      case Ladder::a: mode_a += '-'; break;
      case Ladder::a_dag: mode_a += '+'; break;
      case Ladder::b: mode_b += '-'; break;
      case Ladder::b_dag: mode_b += '+'; break;
    }
  }
  LadderExpression<T> out;
  for (const auto& [ka, ca] : detail::normal_order_mode(mode_a))
    for (const auto& [kb, cb] : detail::normal_order_mode(mode_b))
      out.add({ka.first, ka.second, kb.first, kb.second}, scalar_traits<T>::from_int(ca * cb));
  return out;
}

/// Re-normal-orders an expression word by word; a fixed point on canonical input.
template <Coefficient T>
LadderExpression<T> normal_order(const LadderExpression<T>& x) {
  LadderExpression<T> out;
  for (const auto& [e, c] : x.terms()) {
    std::vector<Ladder> word;
    word.insert(word.end(), e.a_dag, Ladder::a_dag);
    word.insert(word.end(), e.a, Ladder::a);
    word.insert(word.end(), e.b_dag, Ladder::b_dag);
    word.insert(word.end(), e.b, Ladder::b);
    out += normal_order<T>(word) * c;
  }
  return out;
}

template <Coefficient T>
LadderExpression<T> multiply(const LadderExpression<T>& x, const LadderExpression<T>& y) {
  LadderExpression<T> out;
  for (const auto& [ex, cx] : x.terms()) {
    for (const auto& [ey, cy] : y.terms()) {
      const auto pa = detail::mode_product(ex.a_dag, ex.a, ey.a_dag, ey.a);
      const auto pb = detail::mode_product(ex.b_dag, ex.b, ey.b_dag, ey.b);
      const T c = cx * cy;
      for (const auto& [ka, na] : pa)
        for (const auto& [kb, nb] : pb)
          out.add({ka.first, ka.second, kb.first, kb.second}, c * scalar_traits<T>::from_int(na * nb));
    }
  }
  return out;
}

template <Coefficient T>
LadderExpression<T> power(const LadderExpression<T>& x, unsigned k) {
  auto out = LadderExpression<T>::identity();
  for (unsigned i = 0; i < k; ++i) out = multiply(out, x);
  return out;
}

/// Formal adjoint for real coefficients: swaps creation and annihilation exponents.
template <Coefficient T>
LadderExpression<T> adjoint(const LadderExpression<T>& x) {
  LadderExpression<T> out;
  for (const auto& [e, c] : x.terms()) out.add(e.adjoint(), c);
  return out;
}

template <Coefficient T>
LadderExpression<T> mode_swap(const LadderExpression<T>& x) {
  LadderExpression<T> out;
  for (const auto& [e, c] : x.terms()) out.add(e.mode_swapped(), c);
  return out;
}

template <Coefficient T>
bool is_hermitian(const LadderExpression<T>& x) {
  return adjoint(x) == x;
}

/// W (a^dag a + b^dag b + 1); eigenvalue (n1 + n2 + 1) W.
template <Coefficient T>
LadderExpression<T> build_H0(const T& W) {
  const T one = scalar_traits<T>::from_int(1);
  LadderExpression<T> out;
  out.add({1, 1, 0, 0}, one);
  out.add({0, 0, 1, 1}, one);
  out.add({}, one);
  return out * W;
}

/// The ordering W (a a^dag + b b^dag + 1) as printed; normal-orders to W (a^dag a + b^dag b + 3).
template <Coefficient T>
LadderExpression<T> build_H0_printed_ordering(const T& W) {
  const std::vector<Ladder> aa{Ladder::a, Ladder::a_dag};
  const std::vector<Ladder> bb{Ladder::b, Ladder::b_dag};
  return (normal_order<T>(aa) + normal_order<T>(bb) + LadderExpression<T>::identity()) * W;
}

/// [(a + a^dag)^2 + (b + b^dag)^2]^3, the perturbation without its B^2/8 prefactor.
template <Coefficient T>
LadderExpression<T> build_H1_bracket() {
  using E = LadderExpression<T>;
  const E x = E::factor(Ladder::a) + E::factor(Ladder::a_dag);
  const E y = E::factor(Ladder::b) + E::factor(Ladder::b_dag);
  const E s = multiply(x, x) + multiply(y, y);
  return multiply(multiply(s, s), s);
}

/// (B^2 / 8) [(a + a^dag)^2 + (b + b^dag)^2]^3.
template <Coefficient T>
LadderExpression<T> build_H1(const T& B) {
  return build_H1_bracket<T>() * scalar_traits<T>::div_int(B * B, 8);
}

namespace detail {

// Appends the integers whose product is the square of <m| (a^dag)^r a^s |n>.
// Returns false when the element vanishes.
inline bool mode_element_factors(unsigned m, unsigned n, unsigned r, unsigned s, std::vector<std::uint64_t>& factors) {
  if (s > n || n - s + r != m) return false;
  for (unsigned j = n - s + 1; j <= n; ++j) factors.push_back(j);  // a^s: n!/(n-s)!
  for (unsigned j = n - s + 1; j <= m; ++j) factors.push_back(j);  // (a^dag)^r: m!/(n-s)!
  return true;
}

}  // namespace detail

/// <bra| expr |ket> using a|n> = sqrt(n)|n-1>, a^dag|n> = sqrt(n+1)|n+1>.
template <Coefficient T>
T matrix_element(const FockLabel& bra, const FockLabel& ket, const LadderExpression<T>& expr) {
  T out{};
  std::vector<std::uint64_t> factors;
  for (const auto& [e, c] : expr.terms()) {
    factors.clear();
    if (!detail::mode_element_factors(bra.n1, ket.n1, e.a_dag, e.a, factors)) continue;
    if (!detail::mode_element_factors(bra.n2, ket.n2, e.b_dag, e.b, factors)) continue;
    out += c * scalar_traits<T>::sqrt_of_product(factors);
  }
  return out;
}

/// Operator on the truncated basis {(n1, n2) : n1, n2 <= cutoff}, stored densely.
///
/// `reach` is the operator degree accumulated through products; an element
/// <m|X|n> is trusted only when max occupation + reach <= cutoff.
template <Coefficient T>
class FockMatrix {
 public:
  FockMatrix(unsigned cutoff, unsigned reach)
      : cutoff_(cutoff), reach_(reach), data_(static_cast<std::size_t>(dimension_of(cutoff)) * dimension_of(cutoff)) {}

  static FockMatrix identity(unsigned cutoff) {
    FockMatrix out(cutoff, 0);
    for (std::size_t i = 0; i < out.dimension(); ++i) out.data_[i * out.dimension() + i] = scalar_traits<T>::from_int(1);
    return out;
  }

  static FockMatrix elementary(Ladder l, unsigned cutoff) {
    FockMatrix out(cutoff, 1);
    const std::uint64_t one = 1;
    for (unsigned n1 = 0; n1 <= cutoff; ++n1) {
      for (unsigned n2 = 0; n2 <= cutoff; ++n2) {
        const FockLabel ket{n1, n2};
        FockLabel bra = ket;
        std::uint64_t amplitude_sq = 0;
        switch (l) {
          case Ladder::a:
            if (n1 == 0) continue;
            bra.n1 = n1 - 1;
            amplitude_sq = n1;
            break;
          case Ladder::a_dag:
            if (n1 == cutoff) continue;
            bra.n1 = n1 + 1;
            amplitude_sq = n1 + one;
            break;
          case Ladder::b:
            if (n2 == 0) continue;
            bra.n2 = n2 - 1;
            amplitude_sq = n2;
            break;
          case Ladder::b_dag:
            if (n2 == cutoff) continue;
            bra.n2 = n2 + 1;
            amplitude_sq = n2 + one;
            break;
        }
        const std::uint64_t f[1] = {amplitude_sq};
        out.data_[out.index(bra) * out.dimension() + out.index(ket)] = scalar_traits<T>::sqrt_of_product(f);
      }
    }
    return out;
  }

  [[nodiscard]] unsigned cutoff() const { return cutoff_; }
  [[nodiscard]] unsigned reach() const { return reach_; }
  [[nodiscard]] std::size_t dimension() const { return dimension_of(cutoff_); }
  [[nodiscard]] std::size_t index(const FockLabel& l) const { return static_cast<std::size_t>(l.n1) * (cutoff_ + 1) + l.n2; }
  [[nodiscard]] FockLabel label(std::size_t i) const {
    return {static_cast<unsigned>(i / (cutoff_ + 1)), static_cast<unsigned>(i % (cutoff_ + 1))};
  }

  /// Whether truncation cannot contaminate <bra|X|ket>.
  [[nodiscard]] bool is_trusted(const FockLabel& bra, const FockLabel& ket) const {
    const unsigned occ = std::max({bra.n1, bra.n2, ket.n1, ket.n2});
    return occ + reach_ <= cutoff_;
  }

  /// Element with the truncation-safety check.
  [[nodiscard]] const T& at(const FockLabel& bra, const FockLabel& ket) const {
    if (!is_trusted(bra, ket))
      throw CutoffTooSmall("dense oracle: element (" + std::to_string(bra.n1) + "," + std::to_string(bra.n2) + "|" +
                           std::to_string(ket.n1) + "," + std::to_string(ket.n2) + ") is within reach " +
                           std::to_string(reach_) + " of cutoff " + std::to_string(cutoff_));
    return raw(bra, ket);
  }
  [[nodiscard]] const T& raw(const FockLabel& bra, const FockLabel& ket) const {
    return data_[index(bra) * dimension() + index(ket)];
  }
  [[nodiscard]] const T& raw(std::size_t row, std::size_t col) const { return data_[row * dimension() + col]; }

  FockMatrix& operator+=(const FockMatrix& y) {
    check_compatible(y);
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (!scalar_traits<T>::is_zero(y.data_[i])) data_[i] += y.data_[i];
    reach_ = std::max(reach_, y.reach_);
    return *this;
  }
  FockMatrix& operator*=(const T& s) {
    for (auto& v : data_)
      if (!scalar_traits<T>::is_zero(v)) v = v * s;
    return *this;
  }
  friend FockMatrix operator+(FockMatrix x, const FockMatrix& y) { return x += y; }
  friend FockMatrix operator*(FockMatrix x, const T& s) { return x *= s; }

  /// Literal matrix product; skips structural zeros.
  friend FockMatrix operator*(const FockMatrix& x, const FockMatrix& y) {
    x.check_compatible(y);
    const std::size_t dim = x.dimension();
    FockMatrix out(x.cutoff_, x.reach_ + y.reach_);
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < dim; ++k) {
      rows.clear();
      for (std::size_t i = 0; i < dim; ++i)
        if (!scalar_traits<T>::is_zero(x.data_[i * dim + k])) rows.push_back(i);
      if (rows.empty()) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        const T& ykj = y.data_[k * dim + j];
        if (scalar_traits<T>::is_zero(ykj)) continue;
        for (std::size_t i : rows) out.data_[i * dim + j] += x.data_[i * dim + k] * ykj;
      }
    }
    return out;
  }

  [[nodiscard]] bool is_symmetric() const {
    const std::size_t dim = dimension();
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j)
        if (!(data_[i * dim + j] == data_[j * dim + i])) return false;
    return true;
  }

 private:
  static std::size_t dimension_of(unsigned cutoff) { return static_cast<std::size_t>(cutoff + 1) * (cutoff + 1); }
  void check_compatible(const FockMatrix& y) const {
    if (y.cutoff_ != cutoff_) throw std::invalid_argument("FockMatrix: cutoff mismatch");
  }

  unsigned cutoff_;
  unsigned reach_;
  std::vector<T> data_;  // row-major, (bra, ket)
};

/// Dense truncated-basis matrix of `expr`, built by multiplying elementary
/// raising/lowering matrices word by word.
template <Coefficient T>
FockMatrix<T> dense_matrix(const LadderExpression<T>& expr, unsigned cutoff) {
  FockMatrix<T> out(cutoff, expr.degree());
  const auto factor = [cutoff](Ladder l) { return FockMatrix<T>::elementary(l, cutoff); };
  const FockMatrix<T> ad = factor(Ladder::a_dag), a = factor(Ladder::a), bd = factor(Ladder::b_dag), b = factor(Ladder::b);
  for (const auto& [e, c] : expr.terms()) {
    auto word = FockMatrix<T>::identity(cutoff);
    for (unsigned i = 0; i < e.a_dag; ++i) word = word * ad;
    for (unsigned i = 0; i < e.a; ++i) word = word * a;
    for (unsigned i = 0; i < e.b_dag; ++i) word = word * bd;
    for (unsigned i = 0; i < e.b; ++i) word = word * b;
    out += word * c;
  }
  return out;
}

}  // namespace zeeman
