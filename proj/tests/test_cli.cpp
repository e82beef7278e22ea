#include <filesystem>
#include <random>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlab/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
namespace cli = nlab::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nlab_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_config(const TempDir& t, json c, const std::string& file = "config.json") {
  const fs::path p = t.path / file;
  std::ofstream(p) << c.dump();
  std::ostringstream out, err;
  const int code = cli::run(p, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream s;
  s << is.rdbuf();
  return s.str();
}

json base(const TempDir& t, const std::string& command, int n = 64) {
  return {{"command", command}, {"grid", {{"dim", 1}, {"n", n}}}, {"output_dir", (t.path / "out").string()}};
}

}  // namespace

TEST_CASE("cutnorm of the Dirac fixture") {
  TempDir t;
  json c = base(t, "cutnorm");
  c["fixture"] = "dirac";
  c["expect"] = {{"value", 0.25}, {"tolerance", 3.0 / 65.0}};
  const Outcome o = run_config(t, c);
  CHECK(o.code == cli::kExitPass);
  const json rep = json::parse(slurp(t.path / "out" / "cutnorm.json"));
  CHECK(rep["scalars"]["value"].get<double>() == doctest::Approx(0.25).epsilon(0.1));
  CHECK(fs::exists(t.path / "out" / "cutnorm.csv"));
  CHECK(nlab::validate_report_json(rep).empty());
}

TEST_CASE("capacity of the midpoint") {
  TempDir t;
  json c = base(t, "capacity", 127);
  c["points"] = json::array({json::array({0.5})});
  c["name"] = "cap";
  const Outcome o = run_config(t, c);
  CHECK(o.code == cli::kExitPass);
  const json rep = json::parse(slurp(t.path / "out" / "cap.json"));
  CHECK(rep["scalars"]["value"].get<double>() == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("a failed expectation exits with the assertion code") {
  TempDir t;
  json c = base(t, "cutnorm");
  c["fixture"] = "dirac";
  c["expect"] = {{"value", 1.0}, {"tolerance", 1e-3}};
  const Outcome o = run_config(t, c);
  CHECK(o.code == cli::kExitAssertionFailure);
  CHECK(o.out.find("FAIL expected_value") != std::string::npos);
  CHECK(fs::exists(t.path / "out" / "cutnorm.json"));
}

TEST_CASE("malformed configs write nothing") {
  TempDir t;
  json c = base(t, "continuity");
  c["grid"]["dim"] = 3;
  c["k_list"] = json::array({1, "two"});
  c["bogus"] = true;
  const Outcome o = run_config(t, c);
  CHECK(o.code == cli::kExitConfigError);
  CHECK(o.err.find("/grid/dim") != std::string::npos);
  CHECK(o.err.find("/k_list/1") != std::string::npos);
  CHECK(o.err.find("/bogus") != std::string::npos);
  CHECK(!fs::exists(t.path / "out"));

  std::ofstream(t.path / "broken.json") << "{\"command\": ";
  std::ostringstream out, err;
  CHECK(cli::run(t.path / "broken.json", out, err) == cli::kExitConfigError);
  CHECK(cli::run(t.path / "missing.json", out, err) == cli::kExitConfigError);
  CHECK(!fs::exists(t.path / "out"));
}

TEST_CASE("validate_config reports every problem") {
  json c = {{"command", "nope"}};
  auto errs = cli::validate_config(c);
  REQUIRE(!errs.empty());
  CHECK(errs[0].rfind("/command", 0) == 0);
  errs = cli::validate_config(json::array());
  CHECK(!errs.empty());
  c = {{"command", "cutnorm"}, {"grid", {{"dim", 1}, {"n", 8}}}, {"output_dir", "x"}, {"p", 0.5}};
  errs = cli::validate_config(c);
  bool has_p = false, has_source = false;
  for (const auto& e : errs) {
    has_p |= e.rfind("/p", 0) == 0;
    has_source |= e.find("fixture") != std::string::npos;
  }
  CHECK(has_p);
  CHECK(has_source);
  c = {{"command", "eval"}, {"grid", {{"dim", 1}, {"n", 8}}}, {"output_dir", "x"},
       {"fixture", "dirac"}, {"pair_integrand", {{"id", "no_such_integrand"}}}};
  CHECK(!cli::validate_config(c).empty());
}

TEST_CASE("continuity reports are reproducible byte for byte") {
  TempDir t;
  json c = base(t, "continuity", 127);
  c["family"] = "oscillating_density";
  c["pair_integrand"] = {{"id", "product"}};
  c["u_kind"] = "oscillation";
  c["v_kind"] = "oscillation";
  c["k_list"] = {1, 2, 4, 8};
  c["tolerance"] = 0.01;
  c["name"] = "a";
  REQUIRE(run_config(t, c).code == cli::kExitPass);
  c["name"] = "b";
  REQUIRE(run_config(t, c).code == cli::kExitPass);
  CHECK(slurp(t.path / "out" / "a.csv") == slurp(t.path / "out" / "b.csv"));
  CHECK(slurp(t.path / "out" / "a.json") == slurp(t.path / "out" / "b.json"));
  const json rep = json::parse(slurp(t.path / "out" / "a.json"));
  CHECK(rep["rows"].size() == 4u);
}

TEST_CASE("execute covers every command") {
  TempDir t;
  json c = base(t, "minimize", 31);
  c["family"] = "homogenization";
  c["k"] = 2;
  c["pair_integrand"] = {{"id", "zero"}};
  c["forcing"] = 1.0;
  CHECK(cli::execute(c).all_pass());
  c = base(t, "eval", 31);
  c["fixture"] = "constant";
  c["pair_integrand"] = {{"id", "squared_diff"}};
  CHECK(cli::execute(c).scalars.count("F") == 1u);
  c = base(t, "semicontinuity", 63);
  c["family"] = "oscillating_density";
  c["pair_integrand"] = {{"id", "squared_diff"}};
  c["u_kind"] = "concentration";
  c["k_list"] = {1, 2};
  CHECK(cli::execute(c).rows.size() == 2u);
  c = base(t, "gamma", 31);
  c["family"] = "constant";
  c["pair_integrand"] = {{"id", "squared_diff"}};
  c["forcing"] = 1.0;
  c["k_list"] = {1, 2};
  CHECK(cli::execute(c).all_pass());
  c["command"] = "mosco";
  CHECK(cli::execute(c).all_pass());
  for (const auto& name : cli::command_names()) CHECK(!name.empty());
  CHECK(cli::command_names().size() == 8u);
}

TEST_CASE("fixture listing") {
  const std::string table = cli::fixtures_table();
  CHECK(table.find("dirac") != std::string::npos);
  CHECK(table.find("oscillating_density") != std::string::npos);
  std::istringstream is(table);
  std::string line, prev;
  while (std::getline(is, line)) {
    const std::string id = line.substr(0, line.find(' '));
    CHECK(prev < id);
    prev = id;
  }
}
