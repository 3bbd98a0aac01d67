#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "zeeman/cli/commands.hpp"

using namespace zeeman;
using namespace zeeman::cli;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "zeeman_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// data rows of a CSV with '#' metadata, header dropped
std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::current_path() / ("cli_scratch_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("spectrum_zero_field_energies") {
  const auto r = run({"spectrum", "--B", "0", "--k", "1", "--max-level", "2"});
  REQUIRE(r.code == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 6);
  const double expected[] = {-0.5, -0.125, -0.125, -1.0 / 18, -1.0 / 18, -1.0 / 18};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::stod(rows[i][5]) == Approx(expected[i]).epsilon(1e-15));
    CHECK(std::stod(rows[i][6]) == Approx(expected[i]).epsilon(1e-15));
  }
  CHECK(r.out.rfind("# schema_version=1\n", 0) == 0);
}

TEST_CASE("spectrum_first_order_shift") {
  const auto r = run({"spectrum", "--B", "1", "--max-level", "0"});
  REQUIRE(r.code == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(std::stod(rows[0][3]) == Approx(std::sqrt(2.0) + 20.0 / 8).epsilon(1e-15));
  CHECK(std::stod(rows[0][4]) == Approx(std::sqrt(2.0) + 48.0 / 8).epsilon(1e-15));
}

TEST_CASE("spectrum_is_byte_identical") {
  const std::vector<std::string> args{"spectrum", "--B", "0.3", "--E", "-2", "--max-level", "3", "--seed", "5"};
  CHECK(run(args).out == run(args).out);
}

TEST_CASE("config_file_precedence") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment\nB = 0.5\nmax_level=1\n--k=2\n";
  }
  const auto file_only = run({"spectrum", "--config", (dir / "run.cfg").string()});
  REQUIRE(file_only.code == 0);
  CHECK(file_only.out.find("# config.B=0.5\n") != std::string::npos);
  CHECK(file_only.out.find("# config.k=2\n") != std::string::npos);
  CHECK(rows_of(file_only.out).size() == 3);
  const auto flag_wins = run({"spectrum", "--config", (dir / "run.cfg").string(), "--B", "1"});
  REQUIRE(flag_wins.code == 0);
  CHECK(flag_wins.out.find("# config.B=1\n") != std::string::npos);
  CHECK(flag_wins.out.find("# config.k=2\n") != std::string::npos);

  {
    std::ofstream f(dir / "bad.cfg");
    f << "colour=blue\n";
  }
  CHECK(run({"spectrum", "--config", (dir / "bad.cfg").string()}).code == 2);
  CHECK(run({"spectrum", "--config", (dir / "missing.cfg").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("invalid_configs_exit_2") {
  CHECK(run({"spectrum", "--E", "1", "--W", "2"}).code == 2);
  CHECK(run({"spectrum", "--E", "0"}).code == 2);
  CHECK(run({"spectrum", "--B", "-1"}).code == 2);
  CHECK(run({"spectrum", "--B", "abc"}).code == 2);
  CHECK(run({"spectrum", "--k", "0"}).code == 2);
  CHECK(run({"spectrum", "--format", "xml"}).code == 2);
  CHECK(run({"wigner-slice", "--order", "2"}).code == 2);
  CHECK(run({"wigner-slice", "--n1", "1"}).code == 2);
  CHECK(run({"wigner-slice", "--grid", "2"}).code == 2);
  CHECK(run({"wigner-slice", "--qmin", "3", "--qmax", "1"}).code == 2);
  CHECK(run({"wigner-slice", "--n1", "2", "--n2", "2", "--cutoff", "6"}).code == 2);
  CHECK(run({"wigner-slice", "--B", "1,0.5"}).code == 2);
  CHECK(run({"wigner-slice", "--heatmap"}).code == 2);
  CHECK(run({"negativity", "--tol", "0"}).code == 2);
  CHECK(run({"negativity", "--variant", "2d"}).code == 2);
  CHECK(run({"sweep"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"spectrum", "--bogus", "1"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("wigner_slice_figure_metadata_and_symmetry") {
  const auto r = run({"wigner-slice", "--order", "1", "--E", "10", "--B", "0.5", "--grid", "41"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto f = field_from_csv(in);
  CHECK(f.metadata.at("figure") == "8");
  CHECK(f.metadata.at("schema_version") == "1");
  CHECK(f.metadata.at("config.grid") == "41");
  CHECK(reflection_asymmetry(f) <= 1e-14 * f.max_abs());
  const auto fig1 = run({"wigner-slice", "--order", "0", "--E", "1", "--B", "1", "--grid", "21"});
  CHECK(fig1.out.find("# figure=1\n") != std::string::npos);
}

TEST_CASE("wigner_slice_order_zero_is_field_independent") {
  auto body = [](const std::string& csv) { return csv.substr(csv.find("q,p,f")); };
  const auto a = run({"wigner-slice", "--order", "0", "--B", "1", "--grid", "31"});
  const auto b = run({"wigner-slice", "--order", "0", "--B", "0.1", "--grid", "31"});
  CHECK(body(a.out) == body(b.out));
}

TEST_CASE("wigner_slice_json_and_heatmap") {
  const auto dir = scratch("slice");
  const auto path = (dir / "s.json").string();
  const auto r = run({"wigner-slice", "--grid", "11", "--format", "json", "--out", path, "--heatmap"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["schema_version"] == 1);
  CHECK(j["values"].size() == 11);
  const auto pgm = slurp(path + ".pgm");
  CHECK(pgm.rfind("P5\n11 11\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n11 11\n255\n").size() + 121);
  fs::remove_all(dir);
}

TEST_CASE("negativity_table_rows") {
  const auto r = run({"negativity", "--B", "1", "--max-level", "2"});
  REQUIRE(r.code == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 6);
  std::set<std::pair<std::string, std::string>> labels;
  for (const auto& row : rows) labels.insert({row[0], row[1]});
  CHECK(labels == std::set<std::pair<std::string, std::string>>{{"0", "0"}, {"0", "1"}, {"1", "0"},
                                                                {"1", "1"}, {"2", "0"}, {"0", "2"}});
  CHECK(std::stod(rows[0][4]) == 0.14345);
  CHECK(std::stod(rows[0][5]) == Approx(std::abs(std::stod(rows[0][3]) - 0.14345)).margin(1e-15));
}

TEST_CASE("negativity_paper_column_b01") {
  const auto r = run({"negativity", "--B", "0.1", "--n1", "0", "--n2", "0", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["paper_eta"].get<double>() == 0.0034);
  CHECK(j["schema_version"] == 1);
}

TEST_CASE("negativity_zero_field") {
  auto eta = [](const char* n1) {
    const auto j = json::parse(run({"negativity", "--B", "0", "--n1", n1, "--n2", "0", "--format", "json"}).out);
    return j["rows"][0];
  };
  CHECK(eta("0")["eta"].get<double>() < 1e-8);
  CHECK(eta("0")["paper_eta"].is_null());
  // excited Fock states are not classical: eta = 4/sqrt(e) - 2 for one quantum
  CHECK(eta("1")["eta"].get<double>() == Approx(4.0 / std::sqrt(std::exp(1.0)) - 2.0).margin(1e-9));
}

TEST_CASE("negativity_tolerance_failure_exit_3") {
  const auto r = run({"negativity", "--B", "1", "--max-level", "0", "--tol", "1e-22"});
  CHECK(r.code == 3);
}

TEST_CASE("negativity_variants") {
  auto eta = [](const std::string& variant, const char* n1) {
    const auto j = json::parse(run({"negativity", "--B", "1", "--n1", n1, "--n2", "0", "--variant", variant,
                                    "--format", "json"}).out);
    return j["rows"][0]["eta"].get<double>();
  };
  CHECK(eta("half", "0") == Approx(eta("4d", "0") / 2).epsilon(1e-9));
  // the ground-level slice through (1, 1) is non-negative up to rounding
  CHECK(eta("slice", "0") == 0.0);
  CHECK(eta("slice", "1") > 0.1);
}

TEST_CASE("sweep_manifest_round_trip") {
  const auto dir = scratch("sweep");
  const auto r = run({"sweep", "--out", dir.string(), "--grid", "21", "--max-level", "1"});
  REQUIRE(r.code == 0);
  const auto m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["schema_version"] == 1);
  REQUIRE(m["slices"].size() == 12);
  for (int f = 1; f <= 8; ++f) CHECK(m["figures"].contains(std::to_string(f)));
  for (const auto& s : m["slices"]) {
    const auto f = read_field_csv((dir / s["path"].get<std::string>()).string());
    CHECK(f.grid.nq == 21);
    CHECK(s["max_imag"].get<double>() < 1e-10);
  }
  for (const auto& n : m["negativity"]) CHECK(rows_of(slurp(dir / n["path"].get<std::string>())).size() == 9);
  fs::remove_all(dir);
}

TEST_CASE("sweep_explicit_order_and_determinism") {
  const auto a = scratch("sweep_a"), b = scratch("sweep_b");
  const std::vector<std::string> common{"--order", "1", "--grid", "15", "--max-level", "0", "--B", "0.1,0.5,1", "--E", "1,10"};
  auto args = [&](const fs::path& d) {
    std::vector<std::string> v{"sweep", "--out", d.string()};
    v.insert(v.end(), common.begin(), common.end());
    return v;
  };
  REQUIRE(run(args(a)).code == 0);
  REQUIRE(run(args(b)).code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++files;
  }
  CHECK(files == 6 + 2 + 1);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep_failure_removes_outputs") {
  const auto dir = scratch("sweep_fail");
  const auto r = run({"sweep", "--out", dir.string(), "--grid", "11", "--tol", "1e-22"});
  CHECK(r.code == 3);
  CHECK_FALSE(fs::exists(dir));

  const auto kept = scratch("sweep_kept");
  fs::create_directories(kept);
  {
    std::ofstream f(kept / "mine.txt");
    f << "x";
  }
  CHECK(run({"sweep", "--out", kept.string(), "--grid", "11", "--tol", "1e-22"}).code == 3);
  CHECK(fs::exists(kept / "mine.txt"));
  CHECK(std::distance(fs::directory_iterator(kept), fs::directory_iterator{}) == 1);
  fs::remove_all(kept);
}

TEST_CASE("sweep_empty_B_exit_2") {
  const auto dir = scratch("sweep_empty");
  CHECK(run({"sweep", "--out", dir.string(), "--B", ""}).code == 2);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("parse_config_text_normalizes_keys") {
  const auto m = parse_config_text("--slice_q2 = 0.5\n  # skipped\n\nformat=json\n");
  CHECK(m.at("slice-q2") == "0.5");
  CHECK(m.at("format") == "json");
  CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
}

TEST_CASE("levels_upto_order") {
  const auto l = levels_upto(2);
  REQUIRE(l.size() == 6);
  CHECK(l[0] == FockLabel{0, 0});
  CHECK(l[1] == FockLabel{0, 1});
  CHECK(l[5] == FockLabel{2, 0});
}
