#pragma once

// Run configuration: defaults, then a flat key=value file, then command-line flags.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zeeman/errors.hpp"
#include "zeeman/field.hpp"
#include "zeeman/perturbation.hpp"

namespace zeeman::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kConfigError = 2, kToleranceFailure = 3 };

enum class EtaVariant { full, slice, half };

inline std::string to_string(EtaVariant v) {
  switch (v) {
    case EtaVariant::full: return "4d";
    case EtaVariant::slice: return "slice";
    case EtaVariant::half: return "half";
  }
  return "?";
}

/// Keys accepted in a config file and as --flags.
inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"B",     "E",     "W",        "k",        "n1",   "n2",     "max-level",
                                          "order", "mode",  "delta",    "grid",     "qmin", "qmax",   "pmin",
                                          "pmax",  "slice-q2", "slice-p2", "tol",   "cutoff", "seed", "out",
                                          "format", "heatmap", "variant"};
  return keys;
}

struct RunConfig {
  std::string command;
  std::vector<double> B;  // empty: per-command default
  std::vector<double> E;  // empty and no W: per-command default
  std::optional<double> W;
  double k = 1.0;
  std::optional<unsigned> n1, n2;
  unsigned max_level = 2;
  std::optional<int> order;
  StateMode mode = StateMode::oracle;
  DeltaSource delta = DeltaSource::oracle;
  GridSpec grid;
  double tol = 1e-10;
  unsigned cutoff = 0;  // 0: n1 + n2 + 8
  std::uint64_t seed = 20240601;
  std::string out;
  std::string format = "csv";
  bool heatmap = false;
  EtaVariant variant = EtaVariant::full;

  [[nodiscard]] FockLabel level() const { return {n1.value_or(0), n2.value_or(0)}; }
  [[nodiscard]] int order_or(int fallback) const { return order.value_or(fallback); }

  /// Frequencies to run: W directly, or sqrt(2|E|) for each E.
  [[nodiscard]] std::vector<double> energies(std::vector<double> fallback = {1.0}) const {
    if (W) return {0.5 * *W * *W};
    return E.empty() ? fallback : E;
  }
  [[nodiscard]] static double frequency(double e) { return std::sqrt(2.0 * std::abs(e)); }
  [[nodiscard]] std::vector<double> fields(std::vector<double> fallback = {1.0}) const { return B.empty() ? fallback : B; }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("--" + key + ": not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ConfigError("--" + key + ": not a finite number: '" + v + "'");
  return x;
}

inline unsigned long long parse_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("--" + key + ": expected a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("--" + key + ": integer out of range: '" + v + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
    if (a == std::string::npos) throw ConfigError("--" + key + ": empty list entry");
    out.push_back(parse_double(key, item.substr(a, b - a + 1)));
  }
  if (out.empty()) throw ConfigError("--" + key + ": empty list");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("--" + key + ": expected true or false, got '" + v + "'");
}

}  // namespace detail

/// Flat key=value text; '#' starts a comment line. Keys may carry leading dashes.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r"), y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string{} : s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    if (!known_keys().count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Builds and validates a RunConfig from resolved settings.
inline RunConfig make_config(const std::string& command, const std::map<std::string, std::string>& s) {
  using namespace detail;
  RunConfig c;
  c.command = command;
  for (const auto& [key, v] : s) {
    if (key == "B") c.B = parse_list(key, v);
    else if (key == "E") c.E = parse_list(key, v);
    else if (key == "W") c.W = parse_double(key, v);
    else if (key == "k") c.k = parse_double(key, v);
    else if (key == "n1") c.n1 = static_cast<unsigned>(parse_unsigned(key, v));
    else if (key == "n2") c.n2 = static_cast<unsigned>(parse_unsigned(key, v));
    else if (key == "max-level") c.max_level = static_cast<unsigned>(parse_unsigned(key, v));
    else if (key == "order") c.order = static_cast<int>(parse_unsigned(key, v));
    else if (key == "mode") {
      if (v == "oracle") c.mode = StateMode::oracle;
      else if (v == "paper-literal") c.mode = StateMode::paper_literal;
      else throw ConfigError("--mode: expected paper-literal or oracle");
    } else if (key == "delta") {
      if (v == "oracle") c.delta = DeltaSource::oracle;
      else if (v == "paper") c.delta = DeltaSource::paper;
      else throw ConfigError("--delta: expected paper or oracle");
    } else if (key == "grid") c.grid.nq = c.grid.np = parse_unsigned(key, v);
    else if (key == "qmin") c.grid.q_min = parse_double(key, v);
    else if (key == "qmax") c.grid.q_max = parse_double(key, v);
    else if (key == "pmin") c.grid.p_min = parse_double(key, v);
    else if (key == "pmax") c.grid.p_max = parse_double(key, v);
    else if (key == "slice-q2") c.grid.slice_q2 = parse_double(key, v);
    else if (key == "slice-p2") c.grid.slice_p2 = parse_double(key, v);
    else if (key == "tol") c.tol = parse_double(key, v);
    else if (key == "cutoff") c.cutoff = static_cast<unsigned>(parse_unsigned(key, v));
    else if (key == "seed") c.seed = parse_unsigned(key, v);
    else if (key == "out") c.out = v;
    else if (key == "format") c.format = v;
    else if (key == "heatmap") c.heatmap = parse_bool(key, v);
    else if (key == "variant") {
      if (v == "4d") c.variant = EtaVariant::full;
      else if (v == "slice") c.variant = EtaVariant::slice;
      else if (v == "half") c.variant = EtaVariant::half;
      else throw ConfigError("--variant: expected 4d, slice or half");
    } else throw ConfigError("unknown setting '" + key + "'");
  }

  if (c.W && !c.E.empty()) throw ConfigError("give exactly one of --E and --W");
  if (c.W && !(*c.W > 0.0)) throw ConfigError("--W must be positive");
  for (double e : c.E)
    if (e == 0.0) throw ConfigError("--E must be non-zero (W = sqrt(2|E|))");
  for (double b : c.B)
    if (b < 0.0) throw ConfigError("--B must be non-negative");
  if (!(c.k > 0.0)) throw ConfigError("--k must be positive");
  if (c.order && *c.order != 0 && *c.order != 1) throw ConfigError("--order must be 0 or 1");
  if (c.max_level > 10) throw ConfigError("--max-level must be at most 10");
  if (c.n1.has_value() != c.n2.has_value()) throw ConfigError("give both --n1 and --n2");
  if (c.n1 && *c.n1 + *c.n2 > 20) throw ConfigError("--n1 + --n2 must be at most 20");
  if (c.grid.nq < 3) throw ConfigError("--grid must be at least 3");
  if (c.grid.nq > 4001) throw ConfigError("--grid must be at most 4001");
  c.grid.validate();
  if (!(c.tol > 0.0) || c.tol >= 1.0) throw ConfigError("--tol must lie in (0, 1)");
  if (c.cutoff != 0 && c.cutoff < c.level().total() + 7) throw ConfigError("--cutoff must be at least n1 + n2 + 7");
  if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
  return c;
}

/// Effective configuration, echoed into every output.
inline std::vector<std::pair<std::string, std::string>> echo(const RunConfig& c) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
  };
  std::vector<std::pair<std::string, std::string>> out{{"command", c.command}};
  if (!c.B.empty()) out.emplace_back("B", list(c.B));
  if (c.W) out.emplace_back("W", format_double(*c.W));
  if (!c.E.empty()) out.emplace_back("E", list(c.E));
  out.emplace_back("k", format_double(c.k));
  if (c.n1) out.emplace_back("level", std::to_string(*c.n1) + "," + std::to_string(*c.n2));
  out.emplace_back("max-level", std::to_string(c.max_level));
  if (c.order) out.emplace_back("order", std::to_string(*c.order));
  out.emplace_back("mode", to_string(c.mode));
  out.emplace_back("delta", to_string(c.delta));
  out.emplace_back("grid", std::to_string(c.grid.nq));
  out.emplace_back("qrange", format_double(c.grid.q_min) + "," + format_double(c.grid.q_max));
  out.emplace_back("prange", format_double(c.grid.p_min) + "," + format_double(c.grid.p_max));
  out.emplace_back("slice", format_double(c.grid.slice_q2) + "," + format_double(c.grid.slice_p2));
  out.emplace_back("tol", format_double(c.tol));
  out.emplace_back("cutoff", std::to_string(c.cutoff));
  out.emplace_back("seed", std::to_string(c.seed));
  out.emplace_back("format", c.format);
  out.emplace_back("variant", to_string(c.variant));
  return out;
}

}  // namespace zeeman::cli
