#pragma once

// Spectrum and negativity tables, figure slices, and their CSV/JSON forms.

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeeman/cli/config.hpp"
#include "zeeman/field.hpp"
#include "zeeman/perturbation.hpp"
#include "zeeman/wigner.hpp"

namespace zeeman::cli {

using json = nlohmann::ordered_json;

/// Levels with n1 + n2 <= max_level, by total then n1.
inline std::vector<FockLabel> levels_upto(unsigned max_level) {
  std::vector<FockLabel> out;
  for (unsigned t = 0; t <= max_level; ++t)
    for (unsigned a = 0; a <= t; ++a) out.push_back({a, t - a});
  return out;
}

inline std::string csv_header(const RunConfig& c, const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << '\n';
  for (const auto& [k, v] : extra) os << "# " << k << '=' << v << '\n';
  for (const auto& [k, v] : echo(c)) os << "# config." << k << '=' << v << '\n';
  return os.str();
}

inline json config_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : echo(c)) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------
// Spectrum.

struct SpectrumRow {
  FockLabel level;
  double k0 = 0, k1_paper = 0, k1_oracle = 0, E_paper = 0, E_oracle = 0;
};

inline std::vector<SpectrumRow> spectrum_rows(unsigned max_level, double W, double B, double k) {
  std::vector<SpectrumRow> rows;
  for (const auto l : levels_upto(max_level)) {
    const double dp = delta_paper(l.n1, l.n2).to_double(), dor = delta_oracle(l.n1, l.n2).to_double();
    rows.push_back({l, k0(l.n1, l.n2, W), k0(l.n1, l.n2, W) + B * B / 8.0 * dp, k0(l.n1, l.n2, W) + B * B / 8.0 * dor,
                    energy(l.n1, l.n2, B, k, dp), energy(l.n1, l.n2, B, k, dor)});
  }
  return rows;
}

inline std::string render_spectrum(const RunConfig& c) {
  if (c.fields().size() != 1 || c.energies().size() != 1) throw ConfigError("spectrum takes a single --B and --E");
  const double B = c.fields().front(), E = c.energies().front(), W = RunConfig::frequency(E);
  const auto rows = spectrum_rows(c.max_level, W, B, c.k);
  const std::vector<std::pair<std::string, std::string>> meta{
      {"B", format_double(B)}, {"E", format_double(E)}, {"W", format_double(W)}, {"k", format_double(c.k)}};
  if (c.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"command", "spectrum"}};
    for (const auto& [k, v] : meta) j[k] = v;
    j["config"] = config_json(c);
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"n1", r.level.n1}, {"n2", r.level.n2}, {"k0", r.k0}, {"k1_paper", r.k1_paper},
                     {"k1_oracle", r.k1_oracle}, {"E_paper", r.E_paper}, {"E_oracle", r.E_oracle}});
    j["rows"] = arr;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << csv_header(c, meta) << "n1,n2,k0,k1_paper,k1_oracle,E_paper,E_oracle\n";
  for (const auto& r : rows)
    os << r.level.n1 << ',' << r.level.n2 << ',' << format_double(r.k0) << ',' << format_double(r.k1_paper) << ','
       << format_double(r.k1_oracle) << ',' << format_double(r.E_paper) << ',' << format_double(r.E_oracle) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// States and slices.

inline PhaseSpaceState state_for(FockLabel level, int order, double B, double W, StateMode mode, unsigned cutoff) {
  if (order == 0 || B == 0.0) return PhaseSpaceState::pure(level, W);
  return PhaseSpaceState::from_state(first_order_state(level.n1, level.n2, W, B, mode, cutoff).state);
}

/// Figure captions: (order, E, B) of Figs. 1-8.
struct FigureSpec {
  int figure;
  int order;
  double E;
  double B;
};

inline const std::vector<FigureSpec>& figure_specs() {
  static const std::vector<FigureSpec> figs{{1, 0, 1.0, 1.0},  {2, 0, 1.0, 0.1},  {3, 1, 10.0, 1.0},
                                            {4, 1, 10.0, 0.1}, {5, 1, 1.0, 1.0},  {6, 1, 1.0, 0.1},
                                            {7, 1, 1.0, 0.5},  {8, 1, 10.0, 0.5}};
  return figs;
}

inline std::vector<int> figures_for(int order, double E, double B) {
  std::vector<int> out;
  for (const auto& f : figure_specs())
    if (f.order == order && f.E == E && f.B == B) out.push_back(f.figure);
  return out;
}

struct SliceJob {
  FockLabel level;
  int order = 1;
  double B = 1.0;
  double E = 1.0;
  bool W_given = false;
};

inline Field2D build_slice(const RunConfig& c, const SliceJob& job) {
  const double W = c.W ? *c.W : RunConfig::frequency(job.E);
  const auto state = state_for(job.level, job.order, job.B, W, c.mode, c.cutoff);
  std::map<std::string, std::string> meta{
      {"schema_version", std::to_string(kSchemaVersion)},
      {"B", format_double(job.B)},
      {"E", format_double(job.E)},
      {"E_interpretation", c.W ? "E = W^2/2 from --W" : "W = sqrt(2|E|)"},
      {"level", std::to_string(job.level.n1) + "," + std::to_string(job.level.n2)},
      {"mode", to_string(c.mode)},
      {"order", std::to_string(job.order)},
  };
  std::string figs;
  for (int f : figures_for(job.order, job.E, job.B)) figs += (figs.empty() ? "" : ",") + std::to_string(f);
  if (!figs.empty()) meta["figure"] = figs;
  for (const auto& [k, v] : echo(c)) meta["config." + k] = v;
  return wigner_slice(state, c.grid, meta);
}

inline std::string render_field(const Field2D& f, const std::string& format) {
  if (format == "csv") return to_csv(f);
  json j{{"schema_version", kSchemaVersion}};
  json meta = json::object();
  for (const auto& [k, v] : f.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["grid"] = {{"q_min", f.grid.q_min}, {"q_max", f.grid.q_max}, {"nq", f.grid.nq},
               {"p_min", f.grid.p_min}, {"p_max", f.grid.p_max}, {"np", f.grid.np}};
  json rows = json::array();
  for (std::size_t i = 0; i < f.grid.nq; ++i) {
    json row = json::array();
    for (std::size_t j2 = 0; j2 < f.grid.np; ++j2) row.push_back(f(i, j2));
    rows.push_back(std::move(row));
  }
  j["values"] = rows;
  return j.dump() + "\n";
}

/// max |f(q,p) - f(-q,p)|, |f(q,p) - f(q,-p)| over mirrored nodes.
inline double reflection_asymmetry(const Field2D& f) {
  double worst = 0.0;
  const auto& g = f.grid;
  for (std::size_t i = 0; i < g.nq; ++i)
    for (std::size_t j = 0; j < g.np; ++j) {
      worst = std::max(worst, std::abs(f(i, j) - f(g.nq - 1 - i, j)));
      worst = std::max(worst, std::abs(f(i, j) - f(i, g.np - 1 - j)));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Negativity.

struct NegativityRow {
  FockLabel level;
  double B = 0.0;
  double eta = 0.0;
  double error_estimate = 0.0;
  std::optional<double> paper;

  [[nodiscard]] std::optional<double> deviation() const {
    if (!paper) return std::nullopt;
    return std::abs(eta - *paper);
  }
};

inline NegativityOptions negativity_options(const RunConfig& c) {
  NegativityOptions o;
  o.tolerance = c.tol;
  o.slice = c.variant == EtaVariant::slice;
  o.half = c.variant == EtaVariant::half;
  o.slice_q2 = c.grid.slice_q2;
  o.slice_p2 = c.grid.slice_p2;
  return o;
}

inline std::vector<NegativityRow> negativity_rows(const RunConfig& c, double E, const std::vector<double>& Bs) {
  const double W = c.W ? *c.W : RunConfig::frequency(E);
  const auto levels = c.n1 ? std::vector<FockLabel>{c.level()} : levels_upto(c.max_level);
  const int order = c.order_or(1);
  const auto opt = negativity_options(c);
  std::vector<NegativityRow> rows;
  for (double B : Bs)
    for (const auto l : levels) {
      const auto r = negativity(state_for(l, order, B, W, c.mode, c.cutoff), opt);
      rows.push_back({l, B, r.eta, r.error_estimate, paper_negativity(l, B)});
    }
  return rows;
}

inline std::string render_negativity(const RunConfig& c, double E, const std::vector<NegativityRow>& rows) {
  const double W = c.W ? *c.W : RunConfig::frequency(E);
  const std::vector<std::pair<std::string, std::string>> meta{
      {"E", format_double(E)}, {"W", format_double(W)}, {"order", std::to_string(c.order_or(1))},
      {"eta_definition", c.variant == EtaVariant::slice ? "slice integral |f| / slice integral f - 1"
                         : c.variant == EtaVariant::half ? "(integral |f_W| - 1) / 2"
                                                         : "integral |f_W| - 1 over 4D phase space"}};
  if (c.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"command", "negativity"}};
    for (const auto& [k, v] : meta) j[k] = v;
    j["config"] = config_json(c);
    json arr = json::array();
    for (const auto& r : rows) {
      json row{{"n1", r.level.n1}, {"n2", r.level.n2}, {"B", r.B}, {"eta", r.eta}};
      row["paper_eta"] = r.paper ? json(*r.paper) : json(nullptr);
      row["abs_deviation"] = r.deviation() ? json(*r.deviation()) : json(nullptr);
      row["error_estimate"] = r.error_estimate;
      arr.push_back(std::move(row));
    }
    j["rows"] = arr;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << csv_header(c, meta) << "n1,n2,B,eta,paper_eta,abs_deviation,error_estimate\n";
  for (const auto& r : rows) {
    os << r.level.n1 << ',' << r.level.n2 << ',' << format_double(r.B) << ',' << format_double(r.eta) << ',';
    if (r.paper) os << format_double(*r.paper);
    os << ',';
    if (r.deviation()) os << format_double(*r.deviation());
    os << ',' << format_double(r.error_estimate) << '\n';
  }
  return os.str();
}

}  // namespace zeeman::cli
