#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gci/cli/reproduce.hpp"
#include "gci/cli/runner.hpp"
#include "gci/cli/scenario.hpp"
#include "gci/cli/table.hpp"
#include "gci/errors.hpp"

using namespace gci::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

// Runs the gci binary with stderr folded into stdout.
Outcome run_gci(const std::string& args) {
  const std::string cmd = std::string(GCI_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(GCI_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string scenario(const std::string& name) { return std::string(GCI_SCENARIO_DIR) + "/" + name; }

}  // namespace

TEST_CASE("table serialization", "[cli]") {
  const Table t{{"a", "b,c", "d"}, {{std::string("x\"y"), 0.1, true}, {std::string("plain"), std::nan(""), 3LL}}};
  CHECK(to_csv(t) == "a,\"b,c\",d\r\n\"x\"\"y\",0.1,true\r\nplain,nan,3\r\n");
  const auto j = nlohmann::json::parse(to_json(t));
  CHECK(j["columns"].size() == 3);
  CHECK(j["rows"][1]["b,c"].is_null());
  CHECK(j["rows"][0]["d"] == true);
}

TEST_CASE("scenario diagnostics carry field and line", "[cli]") {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  \"kind\": \"otto\",\n  \"cold\": [0, 1],\n  \"hot\": [0, 2],\n"
                   "  \"t_cold\": -1,\n  \"t_hot\": 1,\n  \"alphas\": [1]\n}",
                   "mem");
    FAIL("expected a scenario error");
  } catch (const ScenarioError& e) {
    CHECK(e.field() == "/t_cold");
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("mem:6") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("{\"name\": \"x\", \"kind\": \"otto\", \"bogus\": 1}"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("{ not json"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario("{\"name\": \"x\", \"kind\": \"unknown\"}"), ScenarioError);
}

TEST_CASE("every shipped scenario parses and runs", "[cli]") {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(GCI_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const Scenario s = load_scenario(entry.path().string());
    CHECK_FALSE(s.name.empty());
    const Table t = run_scenario(s);
    CHECK(t.columns == columns_for(s.body));
    CHECK_FALSE(t.rows.empty());
  }
  CHECK(count >= 9);
}

TEST_CASE("sweeps keep grid order and flag failing points", "[cli]") {
  const Scenario iso = load_scenario(scenario("isochore_alpha.json"));
  const Table t = sweep(iso, SweepParameter::Alpha, {0.5, 1.0, 2.0}, {}, 3);
  CHECK(t.rows.size() == 3);
  CHECK(t.columns.front() == "alpha");
  CHECK(t.columns.back() == "status");
  CHECK(std::get<double>(t.rows[2][0]) == 2.0);
  CHECK_THROWS_AS(sweep(iso, SweepParameter::Alpha, {}), ScenarioError);

  const Scenario otto = load_scenario(scenario("fig3_otto.json"));
  RunOptions one;
  one.alpha = 1.0;
  const Table scaled = sweep(otto, SweepParameter::TemperatureScale, {1.0, 3.0}, one, 2);
  REQUIRE(scaled.rows.size() == 2);
  const auto col = std::find(scaled.columns.begin(), scaled.columns.end(), "eta_actual") - scaled.columns.begin();
  CHECK(std::get<double>(scaled.rows[0][col]) == Catch::Approx(std::get<double>(scaled.rows[1][col])).epsilon(1e-12));

  const Table bad = sweep(iso, SweepParameter::Alpha, {1.0, -1.0});
  REQUIRE(bad.rows.size() == 2);
  CHECK(std::get<std::string>(bad.rows[0].back()) == "ok");
  CHECK(std::get<std::string>(bad.rows[1].back()).find("error") != std::string::npos);
}

TEST_CASE("gci run writes deterministic output", "[cli]") {
  const fs::path a = scratch("a.csv");
  const fs::path b = scratch("b.csv");
  REQUIRE(run_gci("run " + scenario("fig3_otto.json") + " -o " + a.string()).code == 0);
  REQUIRE(run_gci("run " + scenario("fig3_otto.json") + " -o " + b.string()).code == 0);
  const std::string text = read_file(a);
  CHECK(text == read_file(b));
  CHECK(text.rfind("alpha,eta_bound,eta_actual,carnot\r\n", 0) == 0);

  const Outcome fig2 = run_gci("run " + scenario("fig2_highT.json"));
  CHECK(fig2.code == 0);
  CHECK(fig2.out.rfind("alpha_tilde,q_bound,q_actual,condition_ok", 0) == 0);

  const Outcome seeded1 = run_gci("run " + scenario("random_validity.json") + " --seed 5 --format json");
  const Outcome seeded2 = run_gci("run " + scenario("random_validity.json") + " --seed 5 --format json");
  CHECK(seeded1.code == 0);
  CHECK(seeded1.out == seeded2.out);
  CHECK_NOTHROW(nlohmann::json::parse(seeded1.out));
}

TEST_CASE("gci exit codes", "[cli]") {
  CHECK(run_gci("run " + write_file("broken.json", "{ \"name\": ").string()).code == 2);
  const Outcome schema = run_gci("run " + write_file("schema.json", "{\"name\": \"x\",\n \"kind\": \"otto\"}").string());
  CHECK(schema.code == 2);
  CHECK(run_gci("run /nonexistent/file.json").code == 2);
  CHECK(run_gci("sweep " + scenario("isochore_alpha.json") + " --param alpha --grid ''").code == 2);
  CHECK(run_gci("frobnicate").code == 2);
  // Numeric failure: the perturbation pushes the hot populations off the simplex inside the library.
  const Outcome numeric = run_gci("run " + write_file("numeric.json",
                                                      "{\"name\": \"n\", \"kind\": \"half_zero\", \"cold_levels\": [0, 1, 2],"
                                                      " \"t_cold\": 0.5, \"t_hot\": 1, \"fraction\": 200}")
                                               .string());
  CHECK(numeric.code == 3);
  CHECK(numeric.out.find("half_zero_machine") != std::string::npos);
}

TEST_CASE("gci sweep and reproduce", "[cli]") {
  const Outcome s = run_gci("sweep " + scenario("isochore_alpha.json") + " --param alpha --grid 0.5,1,2");
  CHECK(s.code == 0);
  std::size_t lines = 0;
  for (char c : s.out) lines += c == '\n';
  CHECK(lines == 4);  // header plus one row per point

  for (const char* target : {"halfzero", "qutrit", "fig2", "isotherm-convergence"}) {
    const Outcome r = run_gci(std::string("reproduce ") + target);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
  const Outcome fig3 = run_gci("reproduce fig3");
  CHECK(fig3.code == 1);
  CHECK(fig3.out.find("PASS fig3/actual") != std::string::npos);
  CHECK(run_gci("reproduce nothing").code == 2);
}
