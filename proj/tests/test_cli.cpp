#include <doctest.h>

#include "magprop/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace magprop;
using namespace magprop::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("magprop_test_cli_" + name);
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

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(MAGPROP_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kConfigDir = MAGPROP_CONFIG_DIR;

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse(R"(
[experiment]
name = convergence
seed = 17

[constants]
mass = 2

[grid]
dimension = 2
lower = -3
upper = 3
points = 16

[field]
kind = constant_b_symmetric
magnetic_field = 1.5
omega = 1

[scheme]
schemes = endpoint_average/symmetric_split, naive_left/left
mode = imaginary

[time]
t = 0.5
steps_list = 8, 16, 32, 64

[packet]
center = 0.5, 0
width = 0.8
)");
  CHECK(c.experiment == "convergence");
  CHECK(c.seed == 17);
  CHECK(c.constants.mass == 2.0);
  CHECK(c.dimension == 2);
  CHECK(c.points == 16);
  CHECK(c.mode == TimeMode::ImaginaryTime);
  REQUIRE(c.schemes.size() == 2);
  CHECK(c.schemes[1].vector_rule == VectorRule::NaiveLeft);
  CHECK(c.schemes[1].potential_rule == PotentialRule::Left);
  CHECK(c.steps_list == std::vector<int>{8, 16, 32, 64});
  CHECK(c.grid().size() == 256);
  const auto f = c.make_field();
  const Position x(Eigen::Vector2d(1.0, 1.0));
  CHECK(f.potential(x) == doctest::Approx(2.0));  // m omega^2 |x|^2 / 2
  CHECK(f.vector_potential(x)[1] == doctest::Approx(0.75));
  CHECK(c.packet_center_position()[0] == 0.5);
  CHECK(c.entries.size() >= 10);
}

TEST_CASE("unknown keys and sections are named in the error") {
  CHECK(config_error("[grid]\npionts = 16\n").find("grid.pionts") != std::string::npos);
  CHECK(config_error("[gird]\npoints = 16\n").find("gird") != std::string::npos);
  CHECK(config_error("[grid]\npoints = sixteen\n").find("grid.points") != std::string::npos);
  CHECK(config_error("[scheme]\nschemes = average\n").find("scheme.schemes") != std::string::npos);
  config_error("[grid]\npoints = 4\n");
}

TEST_CASE("splitting-order report") {
  const auto c = load_config(kConfigDir + "/splitting_order.ini");
  const auto out = compute_experiment(c);
  CHECK(out.all_pass());
  CHECK(out.data["pairs"].size() == 5);
  CHECK(out.table.columns.front() == "pair");
  CHECK(out.data["all_pass"].get<bool>());
}

TEST_CASE("fresnel-check writes deterministic artifacts") {
  const auto c = load_config(kConfigDir + "/fresnel_check.ini");
  const fs::path a = scratch("fresnel_a"), b = scratch("fresnel_b");
  const auto ra = run_experiment(c, {.output = a, .check = true});
  const auto rb = run_experiment(c, {.output = b, .check = true});
  CHECK(ra.exit_code == kExitOk);
  for (const char* f : {"manifest.json", "report.json", "fresnel-check.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }

  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["artifact"] == "magprop");
  CHECK(m["version"] == "0.1.0");
  CHECK(m["experiment"] == "fresnel-check");
  CHECK(m["config"]["fresnel"]["damping"] == "1e-2");

  const auto report = nlohmann::json::parse(slurp(a / "report.json"));
  CHECK(report["manifest"] == m);
  CHECK(report["data"]["all_pass"].get<bool>());

  const std::string csv = slurp(a / "fresnel-check.csv");
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
  const std::regex real(R"(-?\d\.(\d+)e[+-]\d+)");
  std::size_t reals = 0;
  for (auto it = std::sregex_iterator(csv.begin(), csv.end(), real); it != std::sregex_iterator(); ++it) {
    CHECK((*it)[1].length() >= 11);
    ++reals;
  }
  CHECK(reals > 10);
}

TEST_CASE("failed checks map to exit code 4") {
  auto c = load_config(kConfigDir + "/fresnel_check.ini");
  c.check.max_residual = 1e-30;
  const auto r = run_experiment(c, {.output = scratch("fresnel_strict"), .check = true});
  CHECK(r.exit_code == kExitCheck);
  CHECK_FALSE(r.output.all_pass());
  const auto lenient = run_experiment(c, {.output = scratch("fresnel_lenient"), .check = false});
  CHECK(lenient.exit_code == kExitOk);
}

TEST_CASE("error records") {
  const std::string line = error_line("ConfigInvalid", "grid.points: \"x\"\nbad");
  CHECK(line.find('\n') == std::string::npos);
  const auto j = nlohmann::json::parse(line);
  CHECK(j["error"] == "ConfigInvalid");
  CHECK(j["message"] == "grid.points: \"x\"\nbad");
  CHECK(exit_code_for(Error(ErrorCode::ConfigInvalid, "x")) == kExitConfig);
  CHECK(exit_code_for(Error(ErrorCode::ZeroStep, "x")) == kExitNumeric);
}

TEST_CASE("tool exit codes") {
  const fs::path dir = scratch("tool");
  {
    std::ofstream bad(dir / "bad.ini");
    bad << "[grid]\npionts = 16\n";
  }
  CHECK(run_tool("fresnel-check -c " + (dir / "bad.ini").string()) == kExitConfig);
  CHECK(run_tool("splitting-order -c " + kConfigDir + "/fresnel_check.ini") == kExitConfig);
  CHECK(run_tool("fresnel-check -c " + kConfigDir + "/fresnel_check.ini -o " + (dir / "ok").string() +
                 " --check") == kExitOk);
  CHECK(fs::exists(dir / "ok" / "report.json"));
  CHECK(run_tool("--version") == kExitOk);
}
