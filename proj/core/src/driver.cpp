#include "nvopt/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "nvopt/grape.hpp"
#include "nvopt/harness.hpp"
#include "nvopt/liouville.hpp"

namespace nvopt {
namespace {

namespace fs = std::filesystem;

using ManifestExtra = std::vector<std::pair<std::string, std::string>>;

int effective_workers(const Config& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string csv_header_comment(const Config& cfg) {
  return std::string("# nvopt ") + nvopt_version +
         "\n# config=" + config_hash_hex(cfg) + "\n";
}

void write_manifest(const fs::path& dir, const Config& cfg,
                    const ExperimentConfig& e, const std::string& label,
                    const ManifestExtra& extra) {
  std::ostringstream os;
  os << "nvopt_version=" << nvopt_version << "\n";
  os << "eigen_version=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION
     << "." << EIGEN_MINOR_VERSION << "\n";
  os << "json_version=" << NLOHMANN_JSON_VERSION_MAJOR << "."
     << NLOHMANN_JSON_VERSION_MINOR << "." << NLOHMANN_JSON_VERSION_PATCH
     << "\n";
  os << "config=" << config_hash_hex(cfg) << "\n";
  os << "experiment=" << label << "\n";
  os << "kind=" << e.kind << "\n";
  os << "seed=" << e.seed << "\n";
  for (const auto& [k, v] : extra) os << k << "=" << v << "\n";
  write_text_file((dir / "MANIFEST").string(), os.str());
}

std::vector<Method> methods_of(const ExperimentConfig& e) {
  std::vector<Method> out;
  for (const auto& name : e.methods) {
    const auto m = method_from_name(name);
    if (!m) throw std::invalid_argument("unknown method \"" + name + "\"");
    out.push_back(*m);
  }
  return out;
}

RaceSpec race_spec_of(const Config& cfg, const ExperimentConfig& e, double T) {
  const auto conv = convention_of(cfg);
  RaceSpec s;
  s.dims = e.dims;
  s.dissipation = e.dissipation;
  s.T = T;
  s.dt = cfg.dt_ns;
  s.resolution = e.resolution_ns;
  if (e.kind == "resolution" && s.resolution <= 0.0) s.resolution = 0.05;
  s.methods = methods_of(e);
  s.n_restarts = e.n_restarts;
  s.seed = e.seed;
  s.weights.lambda = e.lambda;
  s.weights.lambda_energy = e.lambda_energy;
  s.grape.step_eps = e.step_eps;
  s.grape.max_iters = e.max_iters;
  s.grape.convergence_window = e.convergence_window;
  s.grape.convergence_tol = e.convergence_tol;
  s.grape.amplitude_cap = units::ghz_to_rad_ns(e.amplitude_cap_ghz, conv);
  s.grape.clamp_nonnegative = e.clamp_nonnegative;
  s.nm_max_evals = e.nm_max_evals;
  s.nm_stall_tol = e.nm_stall_tol;
  s.sampling = sampling_of(cfg);
  return s;
}

void write_race_runs(const fs::path& dir, double T,
                     const std::vector<MethodRace>& races) {
  fs::create_directories(dir / "runs");
  for (const auto& race : races) {
    for (std::size_t r = 0; r < race.runs.size(); ++r) {
      std::ostringstream name;
      name << "T" << format_double(T) << "-" << method_name(race.method)
           << "-r" << r << ".json";
      write_text_file(
          (dir / "runs" / name.str()).string(),
          run_to_json(race.runs[r], units::AmplitudeConvention::plain)
                  .dump(2) +
              "\n");
    }
  }
}

ManifestExtra run_simulate(const Config& cfg, const ExperimentConfig& e,
                           const fs::path& dir, std::ostream& log) {
  const PhysicalConstants phys = cfg.constants.to_physical();
  const auto conv = convention_of(cfg);
  const double a_file = e.amplitudes_ghz.front();
  const double a = units::ghz_to_rad_ns(a_file, conv);
  const double T = e.T_ns.front();
  const NvModel model = build_interaction_model(phys, e.dims, e.dissipation);
  Propagator prop(model);
  ControlField f = gaussian_stirap(default_stirap_params(a, T), T, cfg.dt_ns,
                                   sampling_of(cfg));
  bind_carriers(f, model);
  const int stride = std::max(1, f.n_segments() / 5000);
  const Trajectory tr = propagate_trajectory(
      prop, f, ground_start_state(model), model.levels, stride, true);
  write_trajectory_csv((dir / "trajectory.csv").string(), tr,
                       config_hash_hex(cfg), conv);
  const int tgt = model.index_of(Level::plus_one);

  std::ostringstream csv;
  csv << csv_header_comment(cfg)
      << "dims,dissipation,a_GHz,T_ns,p3,max_trace_drift,"
         "max_hermiticity_defect,min_eigenvalue\n";
  csv << e.dims << ',' << (e.dissipation ? 1 : 0) << ','
      << format_double(a_file) << ',' << format_double(T) << ','
      << format_double(tr.final_state(tgt, tgt).real()) << ','
      << format_double(tr.max_trace_drift) << ','
      << format_double(tr.max_hermiticity_defect) << ','
      << format_double(tr.min_eigenvalue) << '\n';
  write_text_file((dir / "results.csv").string(), csv.str());
  log << "  p3=" << format_double(tr.final_state(tgt, tgt).real())
      << " trace_drift=" << format_double(tr.max_trace_drift) << "\n";
  return {};
}

ManifestExtra run_stirap(const Config& cfg, const ExperimentConfig& e,
                         const fs::path& dir, std::ostream& log) {
  const PhysicalConstants phys = cfg.constants.to_physical();
  const auto conv = convention_of(cfg);
  StirapScanSpec spec;
  for (double a : e.amplitudes_ghz)
    spec.amplitudes.push_back(units::ghz_to_rad_ns(a, conv));
  spec.T_list = e.T_ns;
  spec.dt = cfg.dt_ns;
  spec.sampling = sampling_of(cfg);
  const auto rows = run_stirap_scan(phys, spec, effective_workers(cfg));

  const std::size_t n_t = e.T_ns.size();
  const std::size_t n_a = e.amplitudes_ghz.size();
  std::ostringstream csv;
  csv << csv_header_comment(cfg) << "dims,dissipation,a_GHz,T_ns,p3\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t a_idx = (i / n_t) % n_a;
    csv << rows[i].dims << ',' << (rows[i].dissipation ? 1 : 0) << ','
        << format_double(e.amplitudes_ghz[a_idx]) << ','
        << format_double(rows[i].T) << ',' << format_double(rows[i].p3)
        << '\n';
  }
  write_text_file((dir / "results.csv").string(), csv.str());
  log << "  " << rows.size() << " scan points\n";
  return {};
}

ManifestExtra run_optimize(const Config& cfg, const ExperimentConfig& e,
                           const fs::path& dir, std::ostream& log) {
  const PhysicalConstants phys = cfg.constants.to_physical();
  const auto conv = convention_of(cfg);
  const int workers = effective_workers(cfg);
  std::ostringstream csv;
  csv << csv_header_comment(cfg)
      << "T_ns,method,restart,seed,phi,p3,p4bar,E,max_amplitude_GHz,iters,"
         "best\n";
  for (double T : e.T_ns) {
    const RaceSpec spec = race_spec_of(cfg, e, T);
    const auto races = run_optimization_race(phys, spec, workers);
    for (const auto& race : races) {
      for (std::size_t r = 0; r < race.runs.size(); ++r) {
        const auto& run = race.runs[r];
        csv << format_double(T) << ',' << run.method << ',' << r << ','
            << run.seed << ',' << format_double(run.phi) << ','
            << format_double(run.p3) << ',' << format_double(run.p4bar) << ','
            << format_double(run.energy) << ','
            << format_double(units::rad_ns_to_ghz(run.max_amplitude, conv))
            << ',' << run.iters << ','
            << (r == static_cast<std::size_t>(race.best_index) ? 1 : 0)
            << '\n';
      }
      const auto& best = race.runs[race.best_index];
      log << "  " << method_name(race.method) << " T=" << format_double(T)
          << " best p3=" << format_double(best.p3) << " (restart "
          << race.best_index << ")\n";
    }
    write_race_runs(dir, T, races);
  }
  write_text_file((dir / "results.csv").string(), csv.str());
  return {{"restarts", std::to_string(e.n_restarts)}};
}

ManifestExtra run_robustness(const Config& cfg, const ExperimentConfig& e,
                             const fs::path& dir, std::ostream& log) {
  const PhysicalConstants phys = cfg.constants.to_physical();
  const auto conv = convention_of(cfg);
  const int workers = effective_workers(cfg);
  const double T = e.T_ns.front();
  const RaceSpec spec = race_spec_of(cfg, e, T);
  const auto races = run_optimization_race(phys, spec, workers);
  write_race_runs(dir, T, races);

  RobustnessGrid grid;
  grid.amp_min = e.grid_amp_min;
  grid.amp_max = e.grid_amp_max;
  grid.amp_points = e.grid_amp_points;
  grid.det_min = units::ghz_to_rad_ns(e.grid_det_min_ghz, conv);
  grid.det_max = units::ghz_to_rad_ns(e.grid_det_max_ghz, conv);
  grid.det_points = e.grid_det_points;

  Propagator prop(build_interaction_model(phys, e.dims, e.dissipation));
  const Eigen::MatrixXcd rho0 = ground_start_state(prop.model());

  std::ostringstream csv;
  csv << csv_header_comment(cfg) << "method,dOmega_rel,dDelta_GHz,p3\n";
  for (const auto& race : races) {
    const ControlField& best = race.runs[race.best_index].best_field;
    const Eigen::MatrixXd map =
        run_robustness_map(prop, best, rho0, grid, workers);
    for (int i = 0; i < grid.amp_points; ++i) {
      const double fa =
          grid.amp_points > 1 ? i / (grid.amp_points - 1.0) : 0.0;
      const double d_omega =
          grid.amp_min + fa * (grid.amp_max - grid.amp_min);
      for (int j = 0; j < grid.det_points; ++j) {
        const double fd =
            grid.det_points > 1 ? j / (grid.det_points - 1.0) : 0.0;
        const double d_delta_file =
            e.grid_det_min_ghz + fd * (e.grid_det_max_ghz - e.grid_det_min_ghz);
        csv << method_name(race.method) << ',' << format_double(d_omega)
            << ',' << format_double(d_delta_file) << ','
            << format_double(map(i, j)) << '\n';
      }
    }
    log << "  " << method_name(race.method) << " map nominal p3="
        << format_double(race.runs[race.best_index].p3) << "\n";
  }
  write_text_file((dir / "results.csv").string(), csv.str());
  return {{"restarts", std::to_string(e.n_restarts)},
          {"grid", std::to_string(grid.amp_points) + "x" +
                       std::to_string(grid.det_points)}};
}

ManifestExtra run_dt_ladder(const Config& cfg, const ExperimentConfig& e,
                            const fs::path& dir, std::ostream& log) {
  const PhysicalConstants phys = cfg.constants.to_physical();
  const auto conv = convention_of(cfg);
  const double a = units::ghz_to_rad_ns(e.amplitudes_ghz.front(), conv);
  const double T = e.T_ns.front();
  const DtConvergenceResult res =
      run_dt_convergence(phys, e.dt_ladder_ns, a, T, e.dims, e.dissipation,
                         sampling_of(cfg));
  std::ostringstream csv;
  csv << csv_header_comment(cfg) << "dt_ns,p3,diff_from_prev\n";
  for (const auto& row : res.rows)
    csv << format_double(row.dt) << ',' << format_double(row.p3) << ','
        << format_double(row.diff_from_prev) << '\n';
  write_text_file((dir / "results.csv").string(), csv.str());
  log << "  monotone=" << (res.monotone ? "true" : "false") << "\n";
  return {{"monotone", res.monotone ? "true" : "false"}};
}

}  // namespace

std::string run_experiment(const Config& cfg, const ExperimentConfig& e,
                           std::ostream& log) {
  const std::string label = e.label.empty() ? e.kind : e.label;
  const fs::path dir = fs::path(cfg.output_dir) / label;
  fs::create_directories(dir);
  log << "[" << e.kind << "] " << label << "\n";
  write_text_file((dir / "spec.json").string(),
                  effective_config_json(cfg).dump(2) + "\n");

  ManifestExtra extra;
  if (e.kind == "simulate")
    extra = run_simulate(cfg, e, dir, log);
  else if (e.kind == "stirap-scan")
    extra = run_stirap(cfg, e, dir, log);
  else if (e.kind == "optimize" || e.kind == "resolution")
    extra = run_optimize(cfg, e, dir, log);
  else if (e.kind == "robustness")
    extra = run_robustness(cfg, e, dir, log);
  else if (e.kind == "dt-convergence")
    extra = run_dt_ladder(cfg, e, dir, log);
  else
    throw std::invalid_argument("unknown experiment kind \"" + e.kind + "\"");

  write_manifest(dir, cfg, e, label, extra);
  return dir.string();
}

std::vector<std::string> run_config(const Config& cfg, std::ostream& log) {
  std::vector<std::string> dirs;
  for (const auto& e : cfg.experiments) dirs.push_back(run_experiment(cfg, e, log));
  return dirs;
}

}  // namespace nvopt
