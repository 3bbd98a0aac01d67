#pragma once

// First-order Rayleigh-Schrodinger theory in the two-mode Fock space.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/exact.hpp"
#include "zeeman/field.hpp"
#include "zeeman/fock_algebra.hpp"

namespace zeeman {

enum class DeltaSource { paper, oracle };
enum class StateMode { paper_literal, oracle };

inline std::string to_string(DeltaSource s) { return s == DeltaSource::paper ? "paper" : "oracle"; }
inline std::string to_string(StateMode m) { return m == StateMode::paper_literal ? "paper-literal" : "oracle"; }

inline double k0(unsigned n1, unsigned n2, double W) { return static_cast<double>(n1 + n2 + 1) * W; }

/// The printed correction, term by term (29 printed terms, two of them surds).
inline Surd delta_paper(unsigned n1_, unsigned n2_) {
  const std::int64_t n = n1_, m = n2_;
  const std::int64_t poly =
      (n + 1) * (n + 2) * (n + 3) + (n + 1) * (n + 2) * (n + 2) + (n - 1) * n * (n + 1) * (n + 1) +
      (n + 1) * n * (n + 1) + (n + 1) * n * n + (n + 1) * n * (n - 1) + n * (n - 1) * (n - 1) +
      n * (n - 1) * (n - 2) +
      3 * (n + 1) * n * (m + 1) + 3 * (n + 1) * n * m + 3 * n * n * (m + 1) + 3 * n * n * m +
      3 * (n - 1) * n * (m + 1) + 3 * (n - 1) * n * m + 3 * (m + 1) * m * (n + 1) + 3 * (m + 1) * m * n +
      3 * m * m * (n + 1) + 3 * m * m * n + 3 * (m - 1) * m * (n + 1) + 3 * (m - 1) * m * n +
      (m + 1) * (m + 2) * (m + 3) + (m + 1) * (m + 2) * (m + 2) + (m - 1) * m * (m + 1) * (m + 1) +
      (m + 1) * m * m /* sqrt((m+1)^2 m^4) */ + (m + 1) * m * (m - 1) + m * (m - 1) * (m - 1) +
      m * (m - 1) * (m - 2);
  // sqrt(k^3 (k+1)^3) = k(k+1) sqrt(k(k+1))
  auto cube_root_term = [](std::int64_t k) {
    return Surd(k * (k + 1)) * Surd::sqrt_of(static_cast<std::uint64_t>(k * (k + 1)));
  };
  return Surd(poly) + cube_root_term(n) + cube_root_term(m);
}

namespace detail {
inline const LadderExpression<Surd>& h1_bracket_exact() {
  static const LadderExpression<Surd> h = build_H1_bracket<Surd>();
  return h;
}
}  // namespace detail

/// <n1,n2| [(a+a^dag)^2 + (b+b^dag)^2]^3 |n1,n2>.
inline Surd delta_oracle(unsigned n1, unsigned n2) {
  return matrix_element({n1, n2}, {n1, n2}, detail::h1_bracket_exact());
}

/// Same diagonal element from the literal truncated-matrix product.
inline Surd delta_oracle_dense(unsigned n1, unsigned n2, unsigned cutoff) {
  static thread_local std::map<unsigned, FockMatrix<Surd>> cache;
  auto it = cache.find(cutoff);
  if (it == cache.end()) it = cache.emplace(cutoff, dense_matrix(detail::h1_bracket_exact(), cutoff)).first;
  return it->second.at({n1, n2}, {n1, n2});
}

inline double delta_value(unsigned n1, unsigned n2, DeltaSource s) {
  return (s == DeltaSource::paper ? delta_paper(n1, n2) : delta_oracle(n1, n2)).to_double();
}

inline double k1(unsigned n1, unsigned n2, double W, double B, DeltaSource s) {
  return k0(n1, n2, W) + B * B / 8.0 * delta_value(n1, n2, s);
}

/// -(1/2) [(k - (B^2/8) delta) / N]^2 with N = n1 + n2 + 1.
inline double energy(unsigned n1, unsigned n2, double B, double k, double delta) {
  const double N = static_cast<double>(n1 + n2 + 1);
  const double w = (k - B * B / 8.0 * delta) / N;
  return -0.5 * w * w;
}

inline double energy(unsigned n1, unsigned n2, double B, double k, DeltaSource s) {
  return energy(n1, n2, B, k, delta_value(n1, n2, s));
}

struct FockState {
  std::map<FockLabel, double> coefficients;
  double W = 1.0;
  unsigned cutoff = 0;

  [[nodiscard]] double coefficient(FockLabel l) const {
    const auto it = coefficients.find(l);
    return it == coefficients.end() ? 0.0 : it->second;
  }
  [[nodiscard]] double norm_squared() const {
    double s = 0.0;
    for (const auto& [l, c] : coefficients) s += c * c;
    return s;
  }
  [[nodiscard]] FockState normalized() const {
    FockState out = *this;
    const double n = std::sqrt(norm_squared());
    for (auto& [l, c] : out.coefficients) c /= n;
    return out;
  }
  void set(FockLabel l, double c) {
    if (l.n1 > cutoff || l.n2 > cutoff) throw CutoffTooSmall("FockState: label beyond cutoff");
    if (c == 0.0)
      coefficients.erase(l);
    else
      coefficients[l] = c;
  }
};

inline FockState mode_swap(const FockState& s) {
  FockState out;
  out.W = s.W;
  out.cutoff = s.cutoff;
  for (const auto& [l, c] : s.coefficients) out.coefficients[l.swapped()] = c;
  return out;
}

/// A coefficient as printed, plus the exact value when it is a closed form.
struct PrintedCoefficient {
  std::string text;  // decimal commas normalized to points
  double value = 0.0;
  std::optional<Surd> exact;
  std::string verbatim;  // as printed, before normalization
};

namespace detail {

inline PrintedCoefficient printed_surd(std::string text, Surd s) {
  return {text, s.to_double(), std::move(s), text};
}
/// Printed decimals use a decimal comma ("89,30"); normalized here.
inline PrintedCoefficient printed_decimal(std::string text) {
  const std::string verbatim = text;
  std::replace(text.begin(), text.end(), ',', '.');
  return {text, std::stod(text), std::nullopt, verbatim};
}

/// Printed first-order coefficients in units of B^2/(8W).
inline const std::map<FockLabel, std::map<FockLabel, PrintedCoefficient>>& printed_tables() {
  static const auto tables = [] {
    std::map<FockLabel, std::map<FockLabel, PrintedCoefficient>> t;
    const Surd s2 = Surd::sqrt_of(2);
    t[{0, 0}][{2, 0}] = printed_surd("-21*sqrt(2) - 18 - 25*sqrt(10)", Surd(-21) * s2 - Surd(18) - Surd(25) * Surd::sqrt_of(10));
    t[{0, 0}][{2, 2}] = printed_surd("-3*sqrt(2)/2 - 3", Surd(Rational(-3, 2), 2) - Surd(3));
    t[{0, 0}][{4, 0}] = printed_surd("-30*sqrt(21) - 3*sqrt(6)", Surd(-30) * Surd::sqrt_of(21) - Surd(3) * Surd::sqrt_of(6));
    t[{0, 0}][{4, 2}] = printed_surd("4*sqrt(3)", Surd(4) * Surd::sqrt_of(3));
    t[{0, 0}][{6, 0}] = printed_surd("-8*sqrt(1155)", Surd(-8) * Surd::sqrt_of(1155));
    const std::vector<std::pair<FockLabel, std::string>> excited{
        {{1, 2}, "89,30"},   {{1, 4}, "13,47"},   {{1, 6}, "6,32"},    {{3, 0}, "-89,43"},
        {{3, 2}, "-19,33"},  {{5, 0}, "-23,51"},  {{5, 4}, "-10,31"},  {{7, 0}, "-11,83"}};
    for (const auto& [l, v] : excited) {
      t[{1, 0}][l] = printed_decimal(v);
      // the (0,1) level is printed as the mirror image with every sign flipped
      const std::string flipped = v[0] == '-' ? v.substr(1) : "-" + v;
      t[{0, 1}][l.swapped()] = printed_decimal(flipped);
    }
    return t;
  }();
  return tables;
}

}  // namespace detail

inline bool paper_coefficients_printed(FockLabel level) { return detail::printed_tables().count(level) > 0; }

struct CoefficientRow {
  FockLabel target;
  std::optional<PrintedCoefficient> paper;
  Surd oracle;  // exact, units of B^2/(8W)

  [[nodiscard]] std::optional<double> abs_diff() const {
    if (!paper) return std::nullopt;
    return std::abs(paper->value - oracle.to_double());
  }
};

struct DegenerateCoupling {
  FockLabel target;
  Surd bracket_element;  // <target| bracket |level>, without B^2/8
};

struct PerturbationReport {
  FockLabel level;
  double W = 1.0;
  double B = 0.0;
  double k = 1.0;
  StateMode mode = StateMode::oracle;
  unsigned cutoff = 0;
  double k0 = 0.0;
  Surd delta_paper;
  Surd delta_oracle;
  double k1_paper = 0.0;
  double k1_oracle = 0.0;
  double energy_paper = 0.0;
  double energy_oracle = 0.0;
  bool paper_literal_available = false;  // printed coefficients exist for this level
  std::vector<CoefficientRow> rows;
  std::vector<DegenerateCoupling> degenerate;

  [[nodiscard]] double scale() const { return B * B / (8.0 * W); }
  [[nodiscard]] const CoefficientRow* row(FockLabel t) const {
    for (const auto& r : rows)
      if (r.target == t) return &r;
    return nullptr;
  }
};

struct FirstOrderResult {
  FockState state;
  PerturbationReport report;
};

/// psi1 = psi0 + sum_m <m|H1|n> / (k0_n - k0_m) psi0_m over m1 + m2 != n1 + n2.
/// Paper-literal mode uses the printed coefficients where they exist and the
/// oracle elsewhere (report.paper_literal_available says which).
inline FirstOrderResult first_order_state(unsigned n1, unsigned n2, double W, double B,
                                          StateMode mode = StateMode::oracle, unsigned cutoff = 0, double k = 1.0) {
  if (!(W > 0.0)) throw ConfigError("first_order_state: W must be positive");
  if (B < 0.0) throw ConfigError("first_order_state: B must be non-negative");
  const unsigned level_total = n1 + n2;
  if (cutoff == 0) cutoff = level_total + 8;
  if (cutoff < level_total + 7) throw CutoffTooSmall("first_order_state: cutoff must be at least n1 + n2 + 7");

  const FockLabel level{n1, n2};
  const auto& h = detail::h1_bracket_exact();
  PerturbationReport rep;
  rep.level = level;
  rep.W = W;
  rep.B = B;
  rep.k = k;
  rep.mode = mode;
  rep.cutoff = cutoff;
  rep.k0 = k0(n1, n2, W);
  rep.delta_paper = delta_paper(n1, n2);
  rep.delta_oracle = matrix_element(level, level, h);
  rep.k1_paper = rep.k0 + B * B / 8.0 * rep.delta_paper.to_double();
  rep.k1_oracle = rep.k0 + B * B / 8.0 * rep.delta_oracle.to_double();
  rep.energy_paper = energy(n1, n2, B, k, rep.delta_paper.to_double());
  rep.energy_oracle = energy(n1, n2, B, k, rep.delta_oracle.to_double());

  const auto& tables = detail::printed_tables();
  const auto printed_it = tables.find(level);
  rep.paper_literal_available = printed_it != tables.end();

  std::map<FockLabel, CoefficientRow> rows;
  // degree 6 reaches |m_i - n_i| <= 6 and m1 + m2 <= n1 + n2 + 6
  for (unsigned m1 = n1 >= 6 ? n1 - 6 : 0; m1 <= n1 + 6; ++m1) {
    for (unsigned m2 = n2 >= 6 ? n2 - 6 : 0; m2 <= n2 + 6; ++m2) {
      const FockLabel target{m1, m2};
      if (target == level) continue;
      const Surd element = matrix_element(target, level, h);
      if (element.is_zero()) continue;
      if (target.total() == level_total) {
        rep.degenerate.push_back({target, element});
        continue;
      }
      const std::int64_t gap = static_cast<std::int64_t>(level_total) - static_cast<std::int64_t>(target.total());
      rows[target] = CoefficientRow{target, std::nullopt, element / Rational(gap)};
    }
  }
  if (rep.paper_literal_available) {
    for (const auto& [target, printed] : printed_it->second) {
      auto& row = rows[target];
      row.target = target;
      row.paper = printed;
    }
  }
  for (auto& [t, r] : rows) rep.rows.push_back(r);

  FockState state;
  state.W = W;
  state.cutoff = cutoff;
  state.set(level, 1.0);
  const double scale = rep.scale();
  if (scale != 0.0) {
    for (const auto& r : rep.rows) {
      const bool use_paper = mode == StateMode::paper_literal && rep.paper_literal_available;
      double c = 0.0;
      if (use_paper)
        c = r.paper ? r.paper->value : 0.0;
      else
        c = r.oracle.to_double();
      if (c == 0.0) continue;
      if (r.target.n1 > cutoff || r.target.n2 > cutoff)
        throw CutoffTooSmall("first_order_state: printed target beyond cutoff");
      state.set(r.target, scale * c);
    }
  }
  return {state, rep};
}

/// Brute force: full truncated H1 matrix in floating point, then the same sum.
inline FockState first_order_state_dense(unsigned n1, unsigned n2, double W, double B, unsigned cutoff) {
  const auto h = dense_matrix(build_H1(B), cutoff);
  const FockLabel level{n1, n2};
  FockState s;
  s.W = W;
  s.cutoff = cutoff;
  s.set(level, 1.0);
  for (unsigned m1 = 0; m1 <= cutoff; ++m1)
    for (unsigned m2 = 0; m2 <= cutoff; ++m2) {
      const FockLabel m{m1, m2};
      if (m.total() == level.total()) continue;
      if (!h.is_trusted(m, level)) continue;
      const double v = h.at(m, level);
      if (v == 0.0) continue;
      s.set(m, v / (W * (static_cast<double>(level.total()) - static_cast<double>(m.total()))));
    }
  return s;
}

inline std::string to_csv(const PerturbationReport& r) {
  std::ostringstream os;
  os << "# schema_version=1\n";
  os << "# level=" << r.level.n1 << ',' << r.level.n2 << '\n';
  os << "# units=B^2/(8W)\n";
  os << "# paper_literal_available=" << (r.paper_literal_available ? "true" : "false") << '\n';
  os << "m1,m2,paper_coefficient,oracle_coefficient,abs_diff\n";
  for (const auto& row : r.rows) {
    os << row.target.n1 << ',' << row.target.n2 << ',';
    if (row.paper) os << format_double(row.paper->value);
    os << ',' << format_double(row.oracle.to_double()) << ',';
    if (const auto d = row.abs_diff()) os << format_double(*d);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json to_json(const PerturbationReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json j{{"m1", row.target.n1}, {"m2", row.target.n2}};
    j["paper_coefficient"] = row.paper ? nlohmann::ordered_json(row.paper->value) : nullptr;
    j["paper_printed"] = row.paper ? nlohmann::ordered_json(row.paper->verbatim) : nullptr;
    j["paper_normalized"] = row.paper ? nlohmann::ordered_json(row.paper->text) : nullptr;
    j["oracle_coefficient"] = row.oracle.to_double();
    j["oracle_exact"] = row.oracle.str();
    const auto d = row.abs_diff();
    j["abs_diff"] = d ? nlohmann::ordered_json(*d) : nullptr;
    rows.push_back(std::move(j));
  }
  nlohmann::ordered_json degenerate = nlohmann::ordered_json::array();
  for (const auto& d : r.degenerate)
    degenerate.push_back({{"m1", d.target.n1}, {"m2", d.target.n2}, {"bracket_element", d.bracket_element.str()}});
  return {{"schema_version", 1},
          {"level", {r.level.n1, r.level.n2}},
          {"W", r.W},
          {"B", r.B},
          {"k", r.k},
          {"mode", to_string(r.mode)},
          {"cutoff", r.cutoff},
          {"k0", r.k0},
          {"delta_paper", r.delta_paper.to_double()},
          {"delta_paper_exact", r.delta_paper.str()},
          {"delta_oracle", r.delta_oracle.to_double()},
          {"delta_oracle_exact", r.delta_oracle.str()},
          {"k1_paper", r.k1_paper},
          {"k1_oracle", r.k1_oracle},
          {"energy_paper", r.energy_paper},
          {"energy_oracle", r.energy_oracle},
          {"paper_literal_available", r.paper_literal_available},
          {"coefficient_units", "B^2/(8W)"},
          {"coefficients", rows},
          {"degenerate_coupling", degenerate}};
}

}  // namespace zeeman
