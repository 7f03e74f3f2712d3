#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "nvopt/driver.hpp"
#include "nvopt/grape.hpp"
#include "nvopt/harness.hpp"
#include "nvopt/liouville.hpp"

namespace nvopt {
namespace {

Eigen::MatrixXcd random_density(RestartRng& rng, int d) {
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      g(i, j) = std::complex<double>(rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0));
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

bool submatrix_of_full(const PhysicalConstants& c, int dims,
                       bool dissipation) {
  const NvModel full = build_interaction_model(c, 10, true);
  const NvModel red = build_interaction_model(c, dims, dissipation);
  for (int i = 0; i < red.dims; ++i)
    for (int j = 0; j < red.dims; ++j) {
      const int fi = static_cast<int>(red.levels[i]);
      const int fj = static_cast<int>(red.levels[j]);
      if (std::abs(red.h_static(i, j) - full.h_static(fi, fj)) > 1e-14)
        return false;
      if (std::abs(red.v_pattern(i, j) - full.v_pattern(fi, fj)) > 1e-14)
        return false;
    }
  return true;
}

}  // namespace

int run_validate(std::ostream& log) {
  int failures = 0;
  const auto check = [&](const char* name,
                         const std::function<bool()>& fn) {
    bool ok = false;
    std::string note;
    try {
      ok = fn();
    } catch (const std::exception& ex) {
      note = ex.what();
    }
    log << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !note.empty()) log << " (" << note << ")";
    log << "\n";
    if (!ok) ++failures;
  };

  const PhysicalConstants c;

  check("constants in range", [&] { return c.validate().empty(); });

  check("static Hamiltonian and drive pattern are Hermitian", [&] {
    const NvModel m = build_interaction_model(c, 10, true);
    if ((m.h_static - m.h_static.adjoint()).norm() > 1e-12) return false;
    if ((m.v_pattern - m.v_pattern.adjoint()).norm() > 1e-12) return false;
    const int s = m.index_of(Level::shelf);
    return m.h_static.row(s).norm() == 0.0 && m.h_static.col(s).norm() == 0.0 &&
           m.v_pattern.row(s).norm() == 0.0 && m.v_pattern.col(s).norm() == 0.0;
  });

  check("decay table has 23 channels with the pinned total rate", [&] {
    const NvModel m = build_interaction_model(c, 10, true);
    if (m.jumps.size() != 23) return false;
    double total = 0.0;
    for (const auto& j : m.jumps) {
      if (!(j.rate > 0.0)) return false;
      total += j.rate;
    }
    const double expected = 4.0 * (1.0 / 24 + 1.0 / 31 + 1.0 / 104 + 1.0 / 33) +
                            2.0 * (1.0 / 13 + 2.0 / 666) + 1.0 / 303;
    return std::abs(total - expected) < 1e-14 * expected;
  });

  check("two-photon detunings differ by twice the ground Zeeman shift", [&] {
    const NvModel m = build_interaction_model(c, 10, true);
    return std::abs((m.delta1 - m.delta2) - 2.0 * c.zeeman_gs) < 1e-12;
  });

  check("reduced models are submatrices of the full one", [&] {
    if (!submatrix_of_full(c, 4, true)) return false;
    if (!submatrix_of_full(c, 3, true)) return false;
    const NvModel three = build_interaction_model(c, 3, true);
    return three.jumps.empty();
  });

  check("vectorization round trip", [&] {
    RestartRng rng(11);
    Eigen::MatrixXcd m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        m(i, j) = std::complex<double>(rng.uniform(-1.0, 1.0),
                                       rng.uniform(-1.0, 1.0));
    return devectorize(vectorize(m)) == m;
  });

  check("master equation preserves the trace", [&] {
    const NvModel m = build_interaction_model(c, 10, true);
    RestartRng rng(12);
    const Eigen::MatrixXcd rho = random_density(rng, 10);
    if (std::abs(master_rhs(m, rho).trace()) > 1e-12) return false;
    if (std::abs(coupling_rhs(m, rho).trace()) > 1e-12) return false;
    Propagator prop(m);
    ControlField f = constant_field(units::two_pi * 0.8, 0.05, 0.005);
    bind_carriers(f, m);
    const Trajectory tr =
        propagate_trajectory(prop, f, rho, m.levels, 1, true);
    return tr.max_trace_drift < 1e-10 && tr.max_hermiticity_defect < 1e-10 &&
           tr.min_eigenvalue > -1e-9;
  });

  check("shelf decay matches the closed form", [&] {
    const NvModel m = build_interaction_model(c, 10, true);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(10, 10);
    const int s = m.index_of(Level::shelf);
    rho0(s, s) = 1.0;
    ControlField f = constant_field(0.0, 1.0, 0.005);
    bind_carriers(f, m);
    const Trajectory tr = propagate_trajectory(Propagator(m), f, rho0,
                                               m.levels, 1000, false);
    const double expect = std::exp(-1.0 / 303.0);
    const int z = m.index_of(Level::zero);
    return std::abs(tr.final_state(s, s).real() - expect) < 1e-10 &&
           std::abs(tr.final_state(z, z).real() - (1.0 - expect)) < 1e-10;
  });

  check("analytic gradient agrees with finite differences", [&] {
    const NvModel m = build_interaction_model(c, 4, true);
    const Propagator prop(m);
    const double T = 0.05, dt = 0.0005;
    ControlField f =
        gaussian_stirap(default_stirap_params(units::two_pi, T), T, dt);
    bind_carriers(f, m);
    const Eigen::MatrixXcd rho0 = ground_start_state(m);
    GradientEngine eng(prop);
    eng.evaluate(f, prop.to_real(rho0), {});
    const GradientBundle g = eng.gradient_p3(f);
    const double h = 1e-4;
    double num = 0.0, den = 0.0;
    for (int b : {20, 50, 80}) {
      ControlField up = f, dn = f;
      up.omega1[b] += h;
      dn.omega1[b] -= h;
      const double fd = (eval_phi(prop, up, rho0, {}).p3 -
                         eval_phi(prop, dn, rho0, {}).p3) /
                        (2.0 * h);
      num += std::abs(fd - g.d_omega1[b]);
      den += std::abs(fd);
    }
    return den > 0.0 && num / den < 0.05;
  });

  check("optimizer restarts reproduce bit-for-bit", [&] {
    const Propagator prop(build_interaction_model(c, 4, true));
    RaceSpec spec;
    spec.dims = 4;
    spec.T = 0.1;
    spec.dt = 0.005;
    spec.grape.max_iters = 15;
    const OptimizationRun a =
        run_single_restart(prop, Method::rabi_detuning, spec, 7);
    const OptimizationRun b =
        run_single_restart(prop, Method::rabi_detuning, spec, 7);
    return a.phi_history == b.phi_history &&
           (a.best_field.omega1 == b.best_field.omega1).all() &&
           (a.best_field.omega2 == b.best_field.omega2).all() &&
           a.best_field.delta_global == b.best_field.delta_global;
  });

  check("pulse files round-trip bit-exactly", [&] {
    ControlField f = gaussian_stirap(
        default_stirap_params(units::two_pi * 1.37, 0.8), 0.8, 0.005);
    f.delta_global = 0.3125;
    const nlohmann::json j = nlohmann::json::parse(
        pulse_to_json(f, units::AmplitudeConvention::plain).dump());
    const ControlField g = pulse_from_json(j);
    return (f.omega1 == g.omega1).all() && (f.omega2 == g.omega2).all() &&
           f.delta_global == g.delta_global && f.T == g.T && f.dt == g.dt &&
           f.resolution == g.resolution;
  });

  check("config echo round-trips and hashes stably", [&] {
    Config a;
    ExperimentConfig e;
    e.kind = "simulate";
    e.label = "sim";
    a.experiments.push_back(e);
    const Config b = config_from_json(effective_config_json(a));
    return config_hash(a) == config_hash(b) &&
           effective_config_json(a).dump() == effective_config_json(b).dump();
  });

  log << (failures == 0 ? "all checks passed\n"
                        : std::to_string(failures) + " check(s) failed\n");
  return failures;
}

}  // namespace nvopt
