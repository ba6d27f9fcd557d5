#include "kaw/cli.hpp"
#include "kaw/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kaw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kaw_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json reference_json() { return to_json(reference_config()); }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(int (*cmd)(const CliOptions&, std::ostream&, std::ostream&), const CliOptions& o) {
  std::ostringstream out, err;
  const int code = cmd(o, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config round trip") {
  const RunConfig ref = reference_config();
  CHECK(parse_config(to_json(ref)) == ref);
  const RunConfig file = load_config(KAW_SOURCE_DIR "/configs/reference.json");
  CHECK(file == ref);
  CHECK(file.model.L == doctest::Approx(3.141592653589793).epsilon(1e-16));
}

TEST_CASE("config diagnostics") {
  CHECK_THROWS_WITH_AS(parse_config_text("{\n  \"model\": {\"a\": 1,,}\n}"),
                       doctest::Contains("line 2"), ConfigError);
  json j = reference_json();
  j["gains"]["gamma"] = 1.0;
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("gamma"), ConfigError);
  j = reference_json();
  j["numerics"]["dt"] = 1.5;
  CHECK_THROWS_AS(parse_config(j).to_sim().validate(), InvalidArgument);
  j = reference_json();
  j["model"]["L"] = "tau";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/kaw.json"), std::exception);
}

TEST_CASE("check exit codes") {
  const fs::path dir = scratch("check");
  CliOptions o;
  o.config_path = KAW_SOURCE_DIR "/configs/reference.json";
  o.out_dir = (dir / "out").string();
  auto r = invoke(cmd_check, o);
  CHECK(r.code == kExitOk);
  const json cert = json::parse(r.out);
  CHECK(cert.at("mu_guaranteed").get<double>() > 0.0);
  CHECK(fs::exists(dir / "out" / "certificate.json"));

  json j = reference_json();
  j["gains"]["alpha"] = 0.9;
  o.config_path = write_config(dir, j).string();
  r = invoke(cmd_check, o);
  CHECK(r.code == kExitCertificate);
  CHECK(r.err.find("gain_condition") != std::string::npos);

  j = reference_json();
  j["model"]["L"] = 10.0;
  o.config_path = write_config(dir, j).string();
  r = invoke(cmd_check, o);
  CHECK(r.code == kExitCertificate);
  CHECK(r.err.find("length_condition") != std::string::npos);

  std::ofstream(dir / "bad.json") << "{ \"model\": ";
  o.config_path = (dir / "bad.json").string();
  CHECK(invoke(cmd_check, o).code == kExitConfig);
}

TEST_CASE("run outputs") {
  const fs::path dir = scratch("run");
  CliOptions o;
  o.out_dir = (dir / "zero").string();

  SUBCASE("zero data") {
    json j = reference_json();
    j["initial"]["u0"] = {{"kind", "zero"}};
    j["initial"]["normalize"] = {{"kind", "none"}, {"value", 1.0}};
    j["numerics"]["T_end"] = 1.0;
    o.config_path = write_config(dir, j).string();
    const auto r = invoke(cmd_run, o);
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir / "zero" / "series.csv");
    REQUIRE(rows.size() == 12);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      for (std::size_t c = 1; c < rows[k].size(); ++c) CHECK(std::stod(rows[k][c]) == 0.0);
    }
    const json rep = json::parse(slurp(dir / "zero" / "report.json"));
    CHECK(rep.at("fit").at("error") == "nothing to fit");
    CHECK(rep.at("rate").is_null());
  }

  SUBCASE("reference decays at least at the guaranteed rate") {
    o.config_path = KAW_SOURCE_DIR "/configs/reference.json";
    o.out_dir = (dir / "ref").string();
    REQUIRE(invoke(cmd_run, o).code == kExitOk);
    const json rep = json::parse(slurp(dir / "ref" / "report.json"));
    CHECK(rep.at("rate").get<double>() >= rep.at("mu_guaranteed").get<double>());
    CHECK(rep.at("fit").at("r2").get<double>() >= 0.98);
    const std::string first = slurp(dir / "ref" / "series.csv");
    CHECK(first.find('\r') == std::string::npos);
    CHECK(first.substr(0, 2) == "t,");

    o.out_dir = (dir / "ref2").string();
    REQUIRE(invoke(cmd_run, o).code == kExitOk);
    CHECK(slurp(dir / "ref2" / "series.csv") == first);
  }

  SUBCASE("output path is a file") {
    std::ofstream(dir / "occupied") << "x";
    o.config_path = KAW_SOURCE_DIR "/configs/reference.json";
    o.out_dir = (dir / "occupied").string();
    CHECK(invoke(cmd_run, o).code == kExitIo);
  }

  SUBCASE("blow-up") {
    json j = reference_json();
    j["initial"]["u0"]["amplitude"] = 1e150;
    j["initial"]["normalize"] = {{"kind", "none"}, {"value", 1.0}};
    j["numerics"]["T_end"] = 2.0;
    o.config_path = write_config(dir, j).string();
    const auto r = invoke(cmd_run, o);
    CHECK(r.code == kExitSolver);
    CHECK(r.err.find("solver aborted at step") != std::string::npos);
  }
}

TEST_CASE("sweeps") {
  const fs::path dir = scratch("sweep");
  CliOptions o;
  o.out_dir = dir.string();
  o.workers = 2;
  json j = reference_json();
  j["numerics"]["T_end"] = 10.0;

  SUBCASE("length below the critical value stays certified") {
    o.config_path = write_config(dir, j).string();
    o.axis = "model.L";
    o.values = {5.0, 2.0, 4.0, 3.0};
    REQUIRE(invoke(cmd_sweep, o).code == kExitOk);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][0] == "value");
    for (std::size_t k = 1; k < 5; ++k) {
      CHECK(std::stod(rows[k][0]) == static_cast<double>(k + 1));
      CHECK(rows[k][1] == "ok");
      CHECK(rows[k][2] == "true");
      CHECK(std::stod(rows[k][9]) >= std::stod(rows[k][8]));
    }
  }

  SUBCASE("gain condition flips at alpha = 0.8") {
    j["gains"]["beta"] = 0.2;
    o.config_path = write_config(dir, j).string();
    o.axis = "gains.alpha";
    o.values = {0.5, 0.7, 0.85, 0.95};
    REQUIRE(invoke(cmd_sweep, o).code == kExitOk);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[1][4] == "true");
    CHECK(rows[2][4] == "true");
    CHECK(rows[3][4] == "false");
    CHECK(rows[4][4] == "false");
    CHECK(std::stod(rows[3][3]) == doctest::Approx(1.05));
  }

  SUBCASE("manufactured solution error over dt") {
    j["numerics"]["mms"] = true;
    j["numerics"]["T_end"] = 1.0;
    j["numerics"]["N"] = 64;
    o.config_path = write_config(dir, j).string();
    o.axis = "numerics.dt";
    o.values = {0.02, 0.01};
    REQUIRE(invoke(cmd_sweep, o).code == kExitOk);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 3);
    const double e1 = std::stod(rows[1][11]), e2 = std::stod(rows[2][11]);
    CHECK(std::isfinite(e1));
    // N = 64 leaves the spatial error dominant.
    CHECK(e2 <= e1);
    CHECK(e1 < 0.05);
  }

  SUBCASE("bad axis") {
    o.config_path = write_config(dir, j).string();
    o.axis = "model.c";
    o.values = {1.0};
    CHECK(invoke(cmd_sweep, o).code == kExitConfig);
    o.axis = "numerics.N";
    o.values = {64.5};
    const auto r = invoke(cmd_sweep, o);
    CHECK(r.code == kExitSolver);
    CHECK(read_csv(dir / "sweep.csv")[1][1] == "aborted");
  }
}

TEST_CASE("verify") {
  const fs::path dir = scratch("verify");
  CliOptions o;
  o.out_dir = dir.string();
  o.workers = 2;

  json j = reference_json();
  j["numerics"]["dt"] = 1.5;
  o.config_path = write_config(dir, j).string();
  CHECK(invoke(cmd_verify, o).code == kExitConfig);

  o.config_path = KAW_SOURCE_DIR "/configs/reference.json";
  const auto r = invoke(cmd_verify, o);
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS decay_rate") != std::string::npos);
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep.at("pass") == true);
}

TEST_CASE("worker resolution") {
  ::unsetenv("KAW_WORKERS");
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
  ::setenv("KAW_WORKERS", "5", 1);
  CHECK(resolve_workers(3) == 5);
  ::unsetenv("KAW_WORKERS");
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 1.6874723595587622e-4}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}
