#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gradient_oracle.hpp"
#include "nvopt/grape.hpp"
#include "nvopt/model.hpp"
#include "nvopt/propagator.hpp"

using namespace nvopt;
using oracle::FlatGradient;

namespace {

constexpr double two_pi = units::two_pi;

Eigen::MatrixXcd ground_state(const NvModel& m) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(m.dims, m.dims);
  rho(0, 0) = 1.0;
  return rho;
}

// Block-constant two-tone field with non-symmetric envelope values so that
// no gradient component vanishes by construction.
ControlField varied_field(const NvModel& m, double T, double dt,
                          double resolution) {
  ControlField f = constant_field(0.0, T, dt);
  f.resolution = resolution;
  const int bs = f.block_size();
  for (int b = 0; b < f.n_blocks(); ++b) {
    const double w1 = two_pi * (0.8 + 0.5 * std::sin(0.7 * b + 0.3));
    const double w2 = two_pi * (0.9 + 0.4 * std::cos(0.5 * b - 0.2));
    f.omega1.segment(b * bs, bs).setConstant(w1);
    f.omega2.segment(b * bs, bs).setConstant(w2);
  }
  bind_carriers(f, m);
  f.delta_global = two_pi * 0.07;
  return f;
}

}  // namespace

TEST_CASE("grad_energy is the literal quadratic derivative") {
  ControlField f = constant_field(0.0, 0.06, 0.01);
  f.resolution = 0.02;
  f.omega1 << 1.0, 1.0, 3.0, 3.0, -2.0, -2.0;
  f.omega2 << 0.5, 0.5, 0.0, 0.0, 4.0, 4.0;
  const GradientBundle g = grad_energy(f);
  REQUIRE(g.d_omega1.size() == 3);
  CHECK(g.d_omega1[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(g.d_omega1[1] == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(g.d_omega1[2] == doctest::Approx(-8.0).epsilon(1e-15));
  CHECK(g.d_omega2[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g.d_omega2[2] == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(g.d_delta == 0.0);
}

TEST_CASE("analytic gradient matches the surrogate finite difference") {
  const TargetWeights w{-0.5, -1e-4};
  for (int dims : {3, 4}) {
    CAPTURE(dims);
    const NvModel m = build_interaction_model(PhysicalConstants{}, dims);
    const Propagator prop(m);
    const ControlField f = varied_field(m, 0.3, 0.005, 0.015);
    REQUIRE(f.n_segments() == 60);

    GradientEngine engine(prop);
    engine.evaluate(f, prop.to_real(ground_state(m)), w);
    const FlatGradient analytic = oracle::flatten(engine.gradient(f, w));
    const FlatGradient fd =
        oracle::surrogate_fd(prop, f, prop.to_real(ground_state(m)), w, 1e-3);
    REQUIRE(analytic.v.size() == fd.v.size());

    double gnorm = 0.0;
    for (double x : fd.v) gnorm = std::max(gnorm, std::abs(x));
    REQUIRE(gnorm > 0.0);
    for (std::size_t k = 0; k < fd.v.size(); ++k) {
      CAPTURE(k);
      const double rel = std::abs(analytic.v[k] - fd.v[k]) /
                         std::max(std::abs(fd.v[k]), 1e-9 * gnorm);
      CHECK(rel < 1e-3);
    }
  }
}

TEST_CASE("gradient error against the exact objective halves with dt") {
  const TargetWeights w{-0.5, -1e-4};
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  const Eigen::MatrixXcd rho0 = ground_state(m);
  const double T = 0.3;

  auto error_at = [&](double dt) {
    ControlField f =
        gaussian_stirap(default_stirap_params(two_pi * 1.5, T), T, dt);
    f = rebin(f, 0.01);
    bind_carriers(f, m);
    GradientEngine engine(prop);
    engine.evaluate(f, prop.to_real(rho0), w);
    const FlatGradient analytic = oracle::flatten(engine.gradient(f, w));
    const FlatGradient fd = oracle::exact_fd(prop, f, rho0, w, 1e-4);
    double e2 = 0.0;
    for (std::size_t k = 0; k < fd.v.size(); ++k) {
      const double d = analytic.v[k] - fd.v[k];
      e2 += d * d;
    }
    return std::sqrt(e2);
  };

  const double e_coarse = error_at(0.01);
  const double e_fine = error_at(0.005);
  CAPTURE(e_coarse);
  CAPTURE(e_fine);
  REQUIRE(e_coarse > 0.0);
  const double ratio = e_fine / e_coarse;
  CHECK(ratio > 0.25);
  CHECK(ratio < 0.75);
}

TEST_CASE("combined gradient equals the weighted sum of its sweeps") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  const ControlField f = varied_field(m, 0.2, 0.005, 0.02);
  const TargetWeights w{-0.7, -2e-4};

  GradientEngine engine(prop);
  engine.evaluate(f, prop.to_real(ground_state(m)), w);
  const GradientBundle full = engine.gradient(f, w);
  const GradientBundle g3 = engine.gradient_p3(f);
  const GradientBundle g4 = engine.gradient_p4bar(f);
  const GradientBundle ge = grad_energy(f);
  for (int b = 0; b < full.d_omega1.size(); ++b) {
    CHECK(full.d_omega1[b] ==
          doctest::Approx(g3.d_omega1[b] + w.lambda * g4.d_omega1[b] +
                          w.lambda_energy * ge.d_omega1[b])
              .epsilon(1e-12));
    CHECK(full.d_omega2[b] ==
          doctest::Approx(g3.d_omega2[b] + w.lambda * g4.d_omega2[b] +
                          w.lambda_energy * ge.d_omega2[b])
              .epsilon(1e-12));
  }
  CHECK(full.d_delta ==
        doctest::Approx(g3.d_delta + w.lambda * g4.d_delta).epsilon(1e-12));

  // the standalone helpers re-run the forward pass and agree
  const GradientBundle h3 = grad_p3(prop, f, ground_state(m));
  const GradientBundle h4 = grad_p4bar(prop, f, ground_state(m));
  CHECK((h3.d_omega1 - g3.d_omega1).abs().maxCoeff() < 1e-13);
  CHECK((h4.d_omega2 - g4.d_omega2).abs().maxCoeff() < 1e-13);
}

TEST_CASE("eval_phi parts are consistent with a full trajectory") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  const ControlField f = varied_field(m, 0.2, 0.005, 0.02);
  const Eigen::MatrixXcd rho0 = ground_state(m);
  const TargetWeights w{-0.5, -1e-4};

  const PhiParts parts = eval_phi(prop, f, rho0, w);
  const Level rec[] = {Level::plus_one, Level::a2};
  const Trajectory tr = propagate_trajectory(prop, f, rho0, rec, 1, false);
  const int n = f.n_segments();
  REQUIRE(tr.t.size() == static_cast<std::size_t>(n + 1));
  CHECK(parts.p3 == doctest::Approx(tr.populations(n, 0)).epsilon(1e-12));
  const double p4bar = tr.populations.col(1).tail(n).mean();
  CHECK(parts.p4bar == doctest::Approx(p4bar).epsilon(1e-12));
  CHECK(parts.energy == doctest::Approx(field_energy(f)).epsilon(1e-14));
  CHECK(parts.phi == doctest::Approx(parts.p3 + w.lambda * parts.p4bar +
                                     w.lambda_energy * parts.energy)
                         .epsilon(1e-14));
}

TEST_CASE("gradient without a matching forward pass throws") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  const ControlField f = varied_field(m, 0.2, 0.005, 0.02);
  GradientEngine engine(prop);
  CHECK_THROWS_AS(engine.gradient_p3(f), std::logic_error);
  engine.evaluate(f, prop.to_real(ground_state(m)), {});
  const ControlField shorter = varied_field(m, 0.1, 0.005, 0.02);
  CHECK_THROWS_AS(engine.gradient_p3(shorter), std::logic_error);
  CHECK_NOTHROW(engine.gradient_p3(f));
}

TEST_CASE("grape_optimize ascends, respects the cap, and reproduces") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  const Eigen::MatrixXcd rho0 = ground_state(m);
  ControlField f0 = constant_field(two_pi * 0.5, 0.5, 0.005);
  f0 = rebin(f0, 0.025);
  bind_carriers(f0, m);

  GrapeConfig cfg;
  cfg.max_iters = 40;
  cfg.amplitude_cap = two_pi * 0.8;
  const TargetWeights w{-0.1, 0.0};

  const OptimizationRun run = grape_optimize(prop, f0, rho0, w, cfg, "g", 3);
  CHECK(run.method == "g");
  CHECK(run.seed == 3);
  REQUIRE(!run.phi_history.empty());
  CHECK(run.iters == static_cast<int>(run.phi_history.size()) - 1);
  for (std::size_t k = 1; k < run.phi_history.size(); ++k)
    CHECK(run.phi_history[k] >= run.phi_history[k - 1]);
  CHECK(run.phi > run.phi_history.front());
  CHECK(run.phi == run.phi_history.back());
  CHECK(run.max_amplitude <= cfg.amplitude_cap * (1.0 + 1e-12));
  CHECK(run.best_field.n_segments() == f0.n_segments());
  CHECK(run.p3 <= 1.0 + 1e-9);

  const OptimizationRun again = grape_optimize(prop, f0, rho0, w, cfg, "g", 3);
  CHECK(again.phi == run.phi);
  CHECK((again.best_field.omega1 - run.best_field.omega1).abs().maxCoeff() ==
        0.0);
  CHECK((again.best_field.omega2 - run.best_field.omega2).abs().maxCoeff() ==
        0.0);
  CHECK(again.phi_history == run.phi_history);
}

TEST_CASE("grape_optimize clamps envelopes to nonnegative when asked") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  ControlField f0 = constant_field(two_pi * 0.05, 0.3, 0.005);
  f0 = rebin(f0, 0.015);
  bind_carriers(f0, m);

  GrapeConfig cfg;
  cfg.max_iters = 25;
  cfg.clamp_nonnegative = true;
  cfg.amplitude_cap = two_pi * 2.0;
  const OptimizationRun run =
      grape_optimize(prop, f0, ground_state(m), {}, cfg);
  CHECK(run.best_field.omega1.minCoeff() >= 0.0);
  CHECK(run.best_field.omega2.minCoeff() >= 0.0);
  CHECK(run.max_amplitude <= cfg.amplitude_cap * (1.0 + 1e-12));
}

TEST_CASE("grape_optimize can move the common detuning") {
  const NvModel m = build_interaction_model(PhysicalConstants{}, 4);
  const Propagator prop(m);
  ControlField f0 = constant_field(two_pi * 0.4, 0.3, 0.005);
  f0 = rebin(f0, 0.015);
  bind_carriers(f0, m);
  f0.delta_global = two_pi * 0.05;

  GrapeConfig cfg;
  cfg.max_iters = 15;
  cfg.optimize_detuning = true;
  const OptimizationRun run =
      grape_optimize(prop, f0, ground_state(m), {}, cfg);
  CHECK(run.best_field.delta_global != f0.delta_global);
}
