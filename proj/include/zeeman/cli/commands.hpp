#pragma once

// Subcommands: spectrum, wigner-slice, negativity, verify, sweep.
//
//   zeeman_cli spectrum --B 1 --E 1 --max-level 2
//   zeeman_cli wigner-slice --order 1 --E 10 --B 0.5 --out fig8.csv --heatmap
//   zeeman_cli negativity --B 1,0.1 --max-level 2 --format json
//   zeeman_cli verify --out report.json
//   zeeman_cli sweep --B 0.1,0.5,1 --E 1,10 --out figures/
//
// Exit codes: 0 ok, 1 invariant failure, 2 bad configuration, 3 numerical tolerance.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "zeeman/cli/checks.hpp"
#include "zeeman/cli/config.hpp"
#include "zeeman/cli/tables.hpp"
#include "zeeman/errors.hpp"

namespace zeeman::cli {

namespace fs = std::filesystem;

namespace detail {

inline void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

inline void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) out << text;
  else write_file(c.out, text);
}

// Short decimal for file names: 0.1 -> "0.1", 10 -> "10".
inline std::string short_number(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace detail

inline int cmd_spectrum(const RunConfig& c, std::ostream& out) {
  detail::emit(c, render_spectrum(c), out);
  return kOk;
}

inline int cmd_wigner_slice(const RunConfig& c, std::ostream& out) {
  const auto Bs = c.fields(), Es = c.energies();
  if (Bs.size() != 1 || Es.size() != 1) throw ConfigError("wigner-slice takes a single --B and --E (use sweep for lists)");
  if (c.heatmap && c.out.empty()) throw ConfigError("--heatmap needs --out");
  const auto field = build_slice(c, {c.level(), c.order_or(1), Bs.front(), Es.front()});
  detail::emit(c, render_field(field, c.format), out);
  if (c.heatmap) detail::write_file(c.out + ".pgm", to_pgm(field));
  return kOk;
}

inline int cmd_negativity(const RunConfig& c, std::ostream& out) {
  const auto Es = c.energies();
  if (Es.size() != 1) throw ConfigError("negativity takes a single --E (use sweep for lists)");
  const auto rows = negativity_rows(c, Es.front(), c.fields({1.0, 0.1}));
  detail::emit(c, render_negativity(c, Es.front(), rows), out);
  return kOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& log) {
  json checks = json::array();
  bool all = true;
  for (const auto& run : verify_suite(c.seed)) {
    const auto r = run();
    all = all && r.passed;
    log << (r.passed ? "PASS " : "FAIL ") << r.id << ' ' << r.name << '\n';
    auto j = to_json(r);
    j.erase("seconds");  // keeps the report byte-stable
    checks.push_back(std::move(j));
  }
  json report{{"schema_version", kSchemaVersion},
              {"command", "verify"},
              {"config", config_json(c)},
              {"all_invariants_pass", all},
              {"checks", checks},
              {"paper-discrepancy", paper_discrepancies(paper_table_rows())}};
  detail::emit(c, report.dump(2) + "\n", out);
  return all ? kOk : kInvariantFailure;
}

// ---------------------------------------------------------------------------
// Sweep.

struct SweepSlice {
  int order;
  double E;
  double B;
  std::string file;
  std::vector<int> figures;
  double max_imag = 0.0;
  double oracle_rel_diff = 0.0;
  double asymmetry = 0.0;
};

inline int cmd_sweep(const RunConfig& c, std::ostream& log) {
  if (c.out.empty()) throw ConfigError("sweep needs --out DIR");
  const auto Bs = c.fields({0.1, 0.5, 1.0});
  const auto Es = c.energies({1.0, 10.0});
  const std::vector<int> orders = c.order ? std::vector<int>{*c.order} : std::vector<int>{0, 1};
  const fs::path dir(c.out);
  const std::string ext = c.format == "json" ? ".json" : ".csv";

  std::vector<SweepSlice> slices;
  for (int o : orders)
    for (double E : Es)
      for (double B : Bs)
        slices.push_back({o, E, B,
                          "wigner_o" + std::to_string(o) + "_E" + detail::short_number(E) + "_B" +
                              detail::short_number(B) + ext,
                          figures_for(o, E, B)});

  const bool dir_existed = fs::exists(dir);
  fs::create_directories(dir);
  std::mutex mu;
  std::vector<fs::path> written;
  auto record = [&](const fs::path& p) {
    std::lock_guard lock(mu);
    written.push_back(p);
  };

  // slices and per-E negativity tables are independent jobs
  const std::size_t jobs = slices.size() + Es.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        if (i < slices.size()) {
          auto& s = slices[i];
          const auto field = build_slice(c, {c.level(), s.order, s.B, s.E});
          const double W = c.W ? *c.W : RunConfig::frequency(s.E);
          const auto chk = slice_oracle_check(state_for(c.level(), s.order, s.B, W, c.mode, c.cutoff), c.grid);
          s.max_imag = chk.max_imag;
          s.oracle_rel_diff = chk.max_abs_diff;
          s.asymmetry = reflection_asymmetry(field) / std::max(field.max_abs(), 1e-300);
          record(dir / s.file);
          detail::write_file(dir / s.file, render_field(field, c.format));
          if (c.heatmap) {
            record(dir / (s.file + ".pgm"));
            detail::write_file(dir / (s.file + ".pgm"), to_pgm(field));
          }
        } else {
          const double E = Es[i - slices.size()];
          const std::string name = "negativity_E" + detail::short_number(E) + ext;
          record(dir / name);
          detail::write_file(dir / name, render_negativity(c, E, negativity_rows(c, E, Bs)));
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 4);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(n_workers, jobs); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (failure) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    if (!dir_existed) fs::remove(dir, ec);
    std::rethrow_exception(failure);
  }

  json manifest{{"schema_version", kSchemaVersion}, {"command", "sweep"}, {"config", config_json(c)}};
  json arr = json::array();
  std::map<int, std::string> covered;
  for (const auto& s : slices) {
    arr.push_back({{"path", s.file}, {"order", s.order}, {"E", s.E}, {"B", s.B},
                   {"level", {c.level().n1, c.level().n2}}, {"figures", s.figures},
                   {"max_imag", s.max_imag}, {"oracle_max_rel_diff", s.oracle_rel_diff},
                   {"relative_asymmetry", s.asymmetry}});
    for (int f : s.figures) covered[f] = s.file;
    log << "wrote " << (dir / s.file).string() << '\n';
  }
  manifest["slices"] = arr;
  json neg = json::array();
  for (double E : Es) neg.push_back({{"path", "negativity_E" + detail::short_number(E) + ext}, {"E", E}});
  manifest["negativity"] = neg;
  json figs = json::object();
  for (const auto& [f, p] : covered) figs[std::to_string(f)] = p;
  manifest["figures"] = figs;
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point.

inline int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "spectrum") return cmd_spectrum(c, out);
  if (c.command == "wigner-slice") return cmd_wigner_slice(c, out);
  if (c.command == "negativity") return cmd_negativity(c, out);
  if (c.command == "verify") return cmd_verify(c, out, err);
  if (c.command == "sweep") return cmd_sweep(c, err);
  throw ConfigError("unknown command " + c.command);
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Planar hydrogen in a magnetic field: spectra, Wigner functions, negativity"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, std::string> config_path;
  std::map<std::string, bool> heatmap_flag;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "zeroth- and first-order levels and energies"},
      {"wigner-slice", "Wigner function on a (q1, p1) grid at fixed (q2, p2)"},
      {"negativity", "negativity parameter per level and field"},
      {"verify", "run every oracle comparison and report"},
      {"sweep", "slices and negativity tables over B x E, plus a manifest"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path[name], "flat key=value file");
    for (const auto& key : known_keys()) {
      if (key == "heatmap") continue;
      sub->add_option("--" + key, given[name][key]);
    }
    sub->add_flag("--heatmap", heatmap_flag[name], "also write a PGM image");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (const auto* sub : app.get_subcommands()) {
      const std::string name = sub->get_name();
      std::map<std::string, std::string> settings;
      if (!config_path[name].empty()) settings = read_config_file(config_path[name]);
      for (const auto& key : known_keys()) {
        if (key == "heatmap") {
          if (heatmap_flag[name]) settings[key] = "true";
        } else if (sub->count("--" + key)) {
          settings[key] = given[name][key];
        }
      }
      return dispatch(make_config(name, settings), out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CutoffTooSmall& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ToleranceNotMet& e) {
    err << "tolerance failure: " << e.what() << '\n';
    return kToleranceFailure;
  } catch (const NonConvergence& e) {
    err << "tolerance failure: " << e.what() << '\n';
    return kToleranceFailure;
  } catch (const DomainTooSmall& e) {
    err << "tolerance failure: " << e.what() << '\n';
    return kToleranceFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return kConfigError;
}

}  // namespace zeeman::cli
