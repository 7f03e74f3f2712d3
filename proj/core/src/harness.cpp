#include "nvopt/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace nvopt {

const char* method_name(Method m) {
  switch (m) {
    case Method::adiabatic_nm: return "adiabatic-nm";
    case Method::adiabatic_grape: return "adiabatic-grape";
    case Method::rabi_resonant: return "rabi-resonant";
    case Method::rabi_detuning: return "rabi-detuning";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  for (Method m : {Method::adiabatic_nm, Method::adiabatic_grape,
                   Method::rabi_resonant, Method::rabi_detuning})
    if (name == method_name(m)) return m;
  return std::nullopt;
}

void parallel_for_index(int n, int workers,
                        const std::function<void(int)>& job) {
  if (n <= 0) return;
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

Eigen::MatrixXcd ground_start_state(const NvModel& m) {
  const int idx = m.index_of(Level::minus_one);
  if (idx < 0)
    throw std::invalid_argument("model does not contain the |-1> level");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m.dims, m.dims);
  rho(idx, idx) = 1.0;
  return rho;
}

std::vector<StirapRow> run_stirap_scan(const PhysicalConstants& c,
                                       const StirapScanSpec& spec,
                                       int workers) {
  struct Variant {
    int dims;
    bool dissipation;
  };
  const Variant variants[] = {{4, false}, {10, false}, {4, true}, {10, true}};

  struct Job {
    int variant;
    double a, T;
  };
  std::vector<Job> jobs;
  for (int v = 0; v < 4; ++v)
    for (double a : spec.amplitudes)
      for (double T : spec.T_list) jobs.push_back({v, a, T});

  std::vector<StirapRow> rows(jobs.size());
  // one propagator per variant, shared read-only by the workers
  std::vector<Propagator> props;
  props.reserve(4);
  for (const auto& v : variants)
    props.emplace_back(build_interaction_model(c, v.dims, v.dissipation));

  parallel_for_index(
      static_cast<int>(jobs.size()), workers, [&](int i) {
        const Job& job = jobs[i];
        const Propagator& prop = props[job.variant];
        ControlField f =
            gaussian_stirap(default_stirap_params(job.a, job.T), job.T,
                            spec.dt, spec.sampling);
        bind_carriers(f, prop.model());
        const PhiParts parts =
            eval_phi(prop, f, ground_start_state(prop.model()), {});
        rows[i] = {variants[job.variant].dims,
                   variants[job.variant].dissipation, job.a, job.T, parts.p3};
      });
  return rows;
}

namespace {
OptimizationRun run_adiabatic_nm(const Propagator& prop, const RaceSpec& spec,
                                 std::uint64_t restart_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RestartRng rng(restart_seed);
  const double T = spec.T;
  SimplexConfig cfg;
  cfg.max_evals = spec.nm_max_evals;
  cfg.stall_tol = spec.nm_stall_tol;
  cfg.bounds = {{0.0, spec.gauss_amp_max},
                {T / 4.0, 3.0 * T / 4.0},
                {T / 20.0, 3.0 * T / 20.0}};
  std::vector<double> start = {rng.uniform(0.0, spec.gauss_amp_max),
                               rng.uniform(T / 4.0, 3.0 * T / 4.0),
                               rng.uniform(T / 20.0, 3.0 * T / 20.0)};

  const Eigen::MatrixXcd rho0 = ground_start_state(prop.model());
  const double resolution = spec.resolution > 0.0 ? spec.resolution : spec.dt;
  auto field_of = [&](const std::vector<double>& x) {
    GaussianParams p;
    p.a = x[0];
    p.mu_plus = x[1];
    p.mu_minus = T - x[1];
    p.sigma = x[2];
    ControlField f = gaussian_stirap(p, T, spec.dt, spec.sampling);
    bind_carriers(f, prop.model());
    if (resolution != spec.dt) f = rebin(f, resolution);
    return f;
  };
  auto objective = [&](const std::vector<double>& x) {
    return eval_phi(prop, field_of(x), rho0, spec.weights).phi;
  };

  const SimplexResult best = nelder_mead(objective, start, cfg);

  OptimizationRun run;
  run.method = method_name(Method::adiabatic_nm);
  run.seed = restart_seed;
  run.phi_history = best.best_history;
  run.best_field = field_of(best.x);
  const PhiParts parts = eval_phi(prop, run.best_field, rho0, spec.weights);
  run.phi = parts.phi;
  run.p3 = parts.p3;
  run.p4bar = parts.p4bar;
  run.energy = parts.energy;
  run.max_amplitude = max_amplitude(run.best_field);
  run.iters = best.evals;
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return run;
}
}  // namespace

OptimizationRun run_single_restart(const Propagator& prop, Method method,
                                   const RaceSpec& spec,
                                   std::uint64_t restart_seed) {
  if (method == Method::adiabatic_nm)
    return run_adiabatic_nm(prop, spec, restart_seed);

  RestartRng rng(restart_seed);
  const double resolution = spec.resolution > 0.0 ? spec.resolution : spec.dt;
  ControlField f0;
  GrapeConfig gcfg = spec.grape;
  switch (method) {
    case Method::adiabatic_grape: {
      GaussianParams p;
      p.a = rng.uniform(0.0, spec.gauss_amp_max);
      const double mu = rng.uniform(spec.T / 4.0, 3.0 * spec.T / 4.0);
      p.mu_plus = mu;
      p.mu_minus = spec.T - mu;
      p.sigma = rng.uniform(spec.T / 20.0, 3.0 * spec.T / 20.0);
      f0 = gaussian_stirap(p, spec.T, spec.dt, spec.sampling);
      gcfg.optimize_detuning = false;
      break;
    }
    case Method::rabi_resonant: {
      f0 = constant_field(rng.uniform(0.0, spec.rabi_amp_max), spec.T,
                          spec.dt, spec.sampling);
      gcfg.optimize_detuning = false;
      break;
    }
    case Method::rabi_detuning: {
      f0 = constant_field(rng.uniform(0.0, spec.rabi_amp_max), spec.T,
                          spec.dt, spec.sampling);
      f0.delta_global = rng.uniform(0.0, spec.detuning_max);
      gcfg.optimize_detuning = true;
      break;
    }
    default:
      throw std::logic_error("unhandled method");
  }
  bind_carriers(f0, prop.model());
  if (resolution != spec.dt) f0 = rebin(f0, resolution);
  return grape_optimize(prop, f0, ground_start_state(prop.model()),
                        spec.weights, gcfg, method_name(method),
                        restart_seed);
}

std::vector<MethodRace> run_optimization_race(const PhysicalConstants& c,
                                              const RaceSpec& spec,
                                              int workers) {
  const Propagator prop(
      build_interaction_model(c, spec.dims, spec.dissipation));

  std::vector<MethodRace> races(spec.methods.size());
  struct Job {
    int race;
    int restart;
  };
  std::vector<Job> jobs;
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    races[mi].method = spec.methods[mi];
    races[mi].T = spec.T;
    races[mi].runs.resize(spec.n_restarts);
    for (int r = 0; r < spec.n_restarts; ++r)
      jobs.push_back({static_cast<int>(mi), r});
  }

  parallel_for_index(static_cast<int>(jobs.size()), workers, [&](int i) {
    const Job& job = jobs[i];
    races[job.race].runs[job.restart] =
        run_single_restart(prop, races[job.race].method, spec,
                           spec.seed + static_cast<std::uint64_t>(job.restart));
  });

  for (auto& race : races) {
    int best = 0;
    for (int r = 1; r < static_cast<int>(race.runs.size()); ++r)
      if (race.runs[r].p3 > race.runs[best].p3) best = r;
    race.best_index = best;
  }
  return races;
}

Eigen::MatrixXd run_robustness_map(const Propagator& prop,
                                   const ControlField& field,
                                   const Eigen::MatrixXcd& rho0,
                                   const RobustnessGrid& grid, int workers) {
  Eigen::MatrixXd map(grid.amp_points, grid.det_points);
  const int total = grid.amp_points * grid.det_points;
  parallel_for_index(total, workers, [&](int i) {
    const int ia = i / grid.det_points;
    const int id = i % grid.det_points;
    const double da =
        grid.amp_points > 1
            ? grid.amp_min + (grid.amp_max - grid.amp_min) * ia /
                                 (grid.amp_points - 1)
            : grid.amp_min;
    const double dd =
        grid.det_points > 1
            ? grid.det_min + (grid.det_max - grid.det_min) * id /
                                 (grid.det_points - 1)
            : grid.det_min;
    const ControlField f = perturb(field, da, dd);
    map(ia, id) = eval_phi(prop, f, rho0, {}).p3;
  });
  return map;
}

DtConvergenceResult run_dt_convergence(const PhysicalConstants& c,
                                       const std::vector<double>& dt_ladder,
                                       double a, double T, int dims,
                                       bool dissipation,
                                       SegmentSampling sampling) {
  const Propagator prop(build_interaction_model(c, dims, dissipation));
  const Eigen::MatrixXcd rho0 = ground_start_state(prop.model());
  DtConvergenceResult out;
  for (double dt : dt_ladder) {
    ControlField f =
        gaussian_stirap(default_stirap_params(a, T), T, dt, sampling);
    bind_carriers(f, prop.model());
    DtConvergenceRow row;
    row.dt = dt;
    row.p3 = eval_phi(prop, f, rho0, {}).p3;
    row.diff_from_prev =
        out.rows.empty() ? 0.0 : row.p3 - out.rows.back().p3;
    out.rows.push_back(row);
  }
  for (std::size_t i = 2; i < out.rows.size(); ++i)
    if (std::abs(out.rows[i].diff_from_prev) >
        std::abs(out.rows[i - 1].diff_from_prev))
      out.monotone = false;
  return out;
}

}  // namespace nvopt
