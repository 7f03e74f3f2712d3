#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nvopt/config.hpp"
#include "nvopt/io.hpp"

using namespace nvopt;
namespace fs = std::filesystem;

namespace {

const char* cli_path = NVOPT_CLI_PATH;

struct CliResult {
  int code;
  std::string output;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  fs::create_directories("cli_out");
  const std::string log = "cli_out/last_invocation.txt";
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += std::string("\"") + cli_path + "\" " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult res;
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.output = read_text_file(log);
  return res;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

TEST_CASE("cli fixture directory resets") {
  fs::remove_all("cli_out");
  fs::create_directories("cli_out");
  CHECK(fs::exists("cli_out"));
}

TEST_CASE("--version exits cleanly with the library version") {
  const CliResult res = run_cli("--version");
  CHECK(res.code == 0);
  CHECK(res.output.find(nvopt_version) != std::string::npos);
}

TEST_CASE("a bare invocation prints help and signals usage") {
  const CliResult res = run_cli("");
  CHECK(res.code == 2);
  CHECK(res.output.find("simulate") != std::string::npos);
  CHECK(res.output.find("optimize") != std::string::npos);
  CHECK(res.output.find("validate") != std::string::npos);
}

TEST_CASE("usage problems exit with code 2") {
  CHECK(run_cli("optimize -m bogus").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  const CliResult missing = run_cli("optimize -c cli_out/absent.json");
  CHECK(missing.code == 2);
  CHECK(missing.output.find("cannot open config file") != std::string::npos);
  const CliResult dims = run_cli("simulate --dims 7 -o cli_out/baddims");
  CHECK(dims.code == 2);
  CHECK(dims.output.find("must be 3, 4, or 10") != std::string::npos);
  const CliResult env =
      run_cli("simulate -o cli_out/badenv", "NVOPT_WORKERS=abc");
  CHECK(env.code == 2);
  CHECK(env.output.find("NVOPT_WORKERS") != std::string::npos);
}

TEST_CASE("simulate writes the full experiment bundle") {
  const CliResult res =
      run_cli("simulate -o cli_out/sim1 --dims 4 -T 5 --dt 0.01 -w 1");
  CAPTURE(res.output);
  REQUIRE(res.code == 0);
  CHECK(res.output.find("wrote") != std::string::npos);

  const fs::path dir = "cli_out/sim1/simulate";
  REQUIRE(fs::exists(dir / "results.csv"));
  REQUIRE(fs::exists(dir / "spec.json"));
  REQUIRE(fs::exists(dir / "trajectory.csv"));
  REQUIRE(fs::exists(dir / "MANIFEST"));

  const std::string csv = read_text_file((dir / "results.csv").string());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(starts_with(line, "# nvopt "));
  std::getline(in, line);
  CHECK(starts_with(line, "# config="));
  std::getline(in, line);
  CHECK(line ==
        "dims,dissipation,a_GHz,T_ns,p3,max_trace_drift,"
        "max_hermiticity_defect,min_eigenvalue");
  std::getline(in, line);
  CHECK(starts_with(line, "4,1,0.2,5,"));

  const std::string manifest = read_text_file((dir / "MANIFEST").string());
  CHECK(manifest.find("nvopt_version=") != std::string::npos);
  CHECK(manifest.find("kind=simulate") != std::string::npos);
  CHECK(manifest.find("config=") != std::string::npos);

  // the spec echo is itself a valid configuration with the flags applied
  const Config echoed = parse_config((dir / "spec.json").string());
  CHECK(echoed.dt_ns == 0.01);
  CHECK(echoed.workers == 1);
  REQUIRE(echoed.experiments.size() == 1);
  CHECK(echoed.experiments[0].kind == "simulate");
  CHECK(echoed.experiments[0].dims == 4);
  CHECK(echoed.experiments[0].T_ns == std::vector<double>{5.0});

  // the identical invocation reproduces results.csv byte for byte
  const CliResult again =
      run_cli("simulate -o cli_out/sim1 --dims 4 -T 5 --dt 0.01 -w 1");
  REQUIRE(again.code == 0);
  CHECK(read_text_file((dir / "results.csv").string()) == csv);
}

TEST_CASE("optimize merges a config file with command-line flags") {
  fs::create_directories("cli_out");
  {
    std::ofstream cfg("cli_out/opt.json");
    cfg << R"({
      "dt_ns": 0.01,
      "workers": 1,
      "experiments": [{
        "kind": "optimize",
        "label": "opt",
        "dims": 3,
        "dissipation": false,
        "T_ns": [0.2],
        "n_restarts": 2,
        "methods": ["rabi-resonant"],
        "max_iters": 40
      }]
    })";
  }
  const CliResult res =
      run_cli("optimize -c cli_out/opt.json -o cli_out/optrun -n 1 -s 5");
  CAPTURE(res.output);
  REQUIRE(res.code == 0);

  const fs::path dir = "cli_out/optrun/opt";
  REQUIRE(fs::exists(dir / "results.csv"));
  const std::string csv = read_text_file((dir / "results.csv").string());
  CHECK(csv.find("T_ns,method,restart,seed,phi,p3,p4bar,E,max_amplitude_GHz,"
                 "iters,best") != std::string::npos);
  CHECK(csv.find("rabi-resonant") != std::string::npos);
  CHECK(csv.find("adiabatic") == std::string::npos);  // methods from file
  // exactly one data row: the flag cut the restarts from 2 to 1
  int data_rows = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && !starts_with(line, "T_ns")) ++data_rows;
  CHECK(data_rows == 1);

  const std::string manifest = read_text_file((dir / "MANIFEST").string());
  CHECK(manifest.find("restarts=1") != std::string::npos);
  CHECK(manifest.find("seed=5") != std::string::npos);

  const fs::path run_file = dir / "runs" / "T0.2-rabi-resonant-r0.json";
  REQUIRE(fs::exists(run_file));
  const auto j = nlohmann::json::parse(read_text_file(run_file.string()));
  CHECK(j["method"] == "rabi-resonant");
  CHECK(j["seed"] == 5);
  CHECK(j["best_pulse"]["convention"] == "plain");
  CHECK_NOTHROW(pulse_from_json(j["best_pulse"]));
  CHECK(j["p3"].get<double>() >= -1e-9);
  CHECK(j["p3"].get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("validate subcommand passes on this build") {
  const CliResult res = run_cli("validate");
  CAPTURE(res.output);
  CHECK(res.code == 0);
  CHECK(res.output.find("ok") != std::string::npos);
  CHECK(res.output.find("FAIL") == std::string::npos);
}
