#pragma once

// Sampled phase-space grids and their CSV form.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeeman/errors.hpp"

namespace zeeman {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

/// Uniform (q, p) grid, q outer and p inner. The mode-2 slice values only
/// matter for two-mode fields.
struct GridSpec {
  double q_min = -6.0;
  double q_max = 6.0;
  double p_min = -6.0;
  double p_max = 6.0;
  std::size_t nq = 201;
  std::size_t np = 201;
  double slice_q2 = 1.0;
  double slice_p2 = 1.0;

  void validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(q_min) || !finite(q_max) || !finite(p_min) || !finite(p_max) || !finite(slice_q2) ||
        !finite(slice_p2))
      throw ConfigError("grid: non-finite bounds");
    if (!(q_max > q_min) || !(p_max > p_min)) throw ConfigError("grid: empty range");
    if (nq < 2 || np < 2) throw ConfigError("grid: need at least 2 nodes per axis");
  }
  [[nodiscard]] double hq() const { return (q_max - q_min) / static_cast<double>(nq - 1); }
  [[nodiscard]] double hp() const { return (p_max - p_min) / static_cast<double>(np - 1); }
  [[nodiscard]] double q(std::size_t i) const { return i + 1 == nq ? q_max : q_min + static_cast<double>(i) * hq(); }
  [[nodiscard]] double p(std::size_t j) const { return j + 1 == np ? p_max : p_min + static_cast<double>(j) * hp(); }
  [[nodiscard]] std::size_t size() const { return nq * np; }

  static GridSpec square(double lo, double hi, std::size_t n) {
    GridSpec g;
    g.q_min = g.p_min = lo;
    g.q_max = g.p_max = hi;
    g.nq = g.np = n;
    return g;
  }
};

template <class V>
struct BasicField2D {
  GridSpec grid;
  std::vector<V> values;
  std::map<std::string, std::string> metadata;

  BasicField2D() = default;
  explicit BasicField2D(GridSpec g) : grid(g), values(g.size()) {}

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const { return i * grid.np + j; }
  V& operator()(std::size_t i, std::size_t j) { return values[index(i, j)]; }
  const V& operator()(std::size_t i, std::size_t j) const { return values[index(i, j)]; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }
};

using Field2D = BasicField2D<double>;
using ComplexField2D = BasicField2D<std::complex<double>>;

/// Samples f(q, p) on the grid.
template <class V = double, class F>
BasicField2D<V> sample(const GridSpec& grid, F&& f) {
  BasicField2D<V> out(grid);
  for (std::size_t i = 0; i < grid.nq; ++i)
    for (std::size_t j = 0; j < grid.np; ++j) out(i, j) = static_cast<V>(f(grid.q(i), grid.p(j)));
  return out;
}

inline Field2D real_part(const ComplexField2D& z) {
  Field2D out(z.grid);
  out.metadata = z.metadata;
  for (std::size_t k = 0; k < z.values.size(); ++k) out.values[k] = z.values[k].real();
  return out;
}

inline double max_imag(const ComplexField2D& z) {
  double m = 0.0;
  for (const auto& v : z.values) m = std::max(m, std::abs(v.imag()));
  return m;
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// `# key=value` header lines, then `q,p,f` rows.
inline std::string to_csv(const Field2D& f) {
  std::ostringstream os;
  for (const auto& [k, v] : f.metadata) os << "# " << k << '=' << v << '\n';
  os << "q,p,f\n";
  for (std::size_t i = 0; i < f.grid.nq; ++i)
    for (std::size_t j = 0; j < f.grid.np; ++j)
      os << format_double(f.grid.q(i)) << ',' << format_double(f.grid.p(j)) << ',' << format_double(f(i, j)) << '\n';
  return os.str();
}

/// Parses to_csv output. The grid is recovered from the distinct q and p values.
inline Field2D field_from_csv(std::istream& in) {
  Field2D out;
  std::vector<double> qs, ps, fs;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("csv: malformed metadata line");
      out.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != "q,p,f") throw ConfigError("csv: expected q,p,f header");
      header_seen = true;
      continue;
    }
    double q = 0, p = 0, v = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &q, &p, &v) != 3) throw ConfigError("csv: bad row: " + line);
    qs.push_back(q);
    ps.push_back(p);
    fs.push_back(v);
  }
  if (fs.empty()) throw ConfigError("csv: no data rows");
  std::size_t np = 1;
  while (np < qs.size() && qs[np] == qs[0]) ++np;
  if (fs.size() % np != 0) throw ConfigError("csv: ragged grid");
  GridSpec g;
  g.nq = fs.size() / np;
  g.np = np;
  g.q_min = qs.front();
  g.q_max = qs.back();
  g.p_min = ps.front();
  g.p_max = ps[np - 1];
  out.grid = g;
  out.values = std::move(fs);
  return out;
}

inline Field2D read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return field_from_csv(in);
}

/// 8-bit binary PGM, linear map from [min, max] to [0, 255], q down the rows.
inline std::string to_pgm(const Field2D& f) {
  double lo = f.values.front(), hi = f.values.front();
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "P5\n" + std::to_string(f.grid.np) + " " + std::to_string(f.grid.nq) + "\n255\n";
  for (double v : f.values) out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (v - lo) / span))));
  return out;
}

}  // namespace zeeman
