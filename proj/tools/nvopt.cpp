#include <charconv>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvopt/driver.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> method_choices = {
    "adiabatic-nm", "adiabatic-grape", "rabi-resonant", "rabi-detuning"};

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> T;
  std::vector<std::string> methods;
  int restarts = 0;
  int dims = 0;
  double resolution = 0.0;

  CLI::Option* out_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* restarts_opt = nullptr;
  CLI::Option* dims_opt = nullptr;
  CLI::Option* resolution_opt = nullptr;
};

void add_global_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
  o.out_opt = cmd->add_option("-o,--out", o.out_dir, "output directory");
  o.workers_opt =
      cmd->add_option("-w,--workers", o.workers, "worker thread count");
  o.dt_opt = cmd->add_option("--dt", o.dt, "segment length in ns");
}

void add_experiment_options(CLI::App* cmd, CliOptions& o) {
  o.seed_opt = cmd->add_option("-s,--seed", o.seed, "base seed");
  cmd->add_option("-T,--duration", o.T, "transfer window(s) in ns");
  cmd->add_option("-m,--method", o.methods, "strategies to race")
      ->check(CLI::IsMember(method_choices));
  o.restarts_opt =
      cmd->add_option("-n,--restarts", o.restarts, "independent restarts");
  o.dims_opt = cmd->add_option("--dims", o.dims, "model size (3, 4 or 10)");
  o.resolution_opt = cmd->add_option("--resolution", o.resolution,
                                     "envelope hold length in ns");
}

void apply_global_overrides(nvopt::Config& cfg, const CliOptions& o) {
  if (o.out_opt->count()) cfg.output_dir = o.out_dir;
  if (o.workers_opt->count()) {
    cfg.workers = o.workers;
  } else if (const char* env = std::getenv("NVOPT_WORKERS")) {
    int value = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || value < 0)
      throw UsageError("NVOPT_WORKERS must be a non-negative integer, got \"" +
                       s + "\"");
    cfg.workers = value;
  }
  if (o.dt_opt->count()) cfg.dt_ns = o.dt;
}

nvopt::Config config_for_kind(const std::string& kind, const CliOptions& o) {
  nvopt::Config cfg;
  if (!o.config_path.empty()) cfg = nvopt::parse_config(o.config_path);
  apply_global_overrides(cfg, o);

  std::vector<nvopt::ExperimentConfig> selected;
  for (const auto& e : cfg.experiments)
    if (e.kind == kind) selected.push_back(e);
  if (selected.empty()) {
    nvopt::ExperimentConfig e;
    e.kind = kind;
    e.label = kind;
    selected.push_back(e);
  }
  for (auto& e : selected) {
    if (o.seed_opt->count()) e.seed = o.seed;
    if (!o.T.empty()) e.T_ns = o.T;
    if (!o.methods.empty()) e.methods = o.methods;
    if (o.restarts_opt->count()) e.n_restarts = o.restarts;
    if (o.dims_opt->count()) e.dims = o.dims;
    if (o.resolution_opt->count()) e.resolution_ns = o.resolution;
  }
  cfg.experiments = std::move(selected);
  // flags bypass the file parser, so revalidate the merged configuration
  return nvopt::config_from_json(nvopt::effective_config_json(cfg));
}

void run_kind(const std::string& kind, const CliOptions& o) {
  const nvopt::Config cfg = config_for_kind(kind, o);
  for (const auto& dir : nvopt::run_config(cfg, std::cout))
    std::cout << "wrote " << dir << "\n";
}

void run_all(const CliOptions& o) {
  if (o.config_path.empty())
    throw UsageError("a configuration file is required (use --config)");
  nvopt::Config cfg = nvopt::parse_config(o.config_path);
  apply_global_overrides(cfg, o);
  cfg = nvopt::config_from_json(nvopt::effective_config_json(cfg));
  if (cfg.experiments.empty()) {
    std::cout << "no experiments configured\n";
    return;
  }
  for (const auto& dir : nvopt::run_config(cfg, std::cout))
    std::cout << "wrote " << dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nvopt: simulate and optimize laser-driven state transfer in the "
      "nitrogen-vacancy center"};
  app.set_version_flag("--version", std::string(nvopt::nvopt_version));
  app.require_subcommand(0, 1);

  auto top = std::make_shared<CliOptions>();
  add_global_options(&app, *top);

  struct KindCommand {
    const char* name;
    const char* description;
  };
  const KindCommand kinds[] = {
      {"simulate", "propagate Gaussian pulses and write a trajectory"},
      {"stirap-scan", "final transfer over the amplitude x duration grid"},
      {"optimize", "race the optimization strategies from random restarts"},
      {"robustness", "map transfer against amplitude and detuning errors"},
      {"resolution", "optimize with envelopes held over coarse blocks"},
      {"dt-convergence", "sweep the segment length ladder"},
  };
  for (const auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k.name, k.description);
    auto opts = std::make_shared<CliOptions>();
    add_global_options(sub, *opts);
    add_experiment_options(sub, *opts);
    const std::string name = k.name;
    sub->callback([opts, name] { run_kind(name, *opts); });
  }
  CLI::App* validate =
      app.add_subcommand("validate", "run the built-in consistency checks");
  bool validate_failed = false;
  validate->callback(
      [&validate_failed] { validate_failed = nvopt::run_validate(std::cout) > 0; });

  try {
    app.parse(argc, argv);
    if (app.get_subcommands().empty()) {
      if (top->config_path.empty()) {
        std::cout << app.help();
        return 2;
      }
      run_all(*top);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nvopt::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return validate_failed ? 1 : 0;
}
