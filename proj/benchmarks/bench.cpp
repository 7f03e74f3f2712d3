#include <benchmark/benchmark.h>

#include "nvopt/grape.hpp"
#include "nvopt/harness.hpp"
#include "nvopt/liouville.hpp"

namespace {

using namespace nvopt;

void bm_assemble_split(benchmark::State& state) {
  const PhysicalConstants c;
  const NvModel m =
      build_interaction_model(c, static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    auto split = assemble_split(m);
    benchmark::DoNotOptimize(split.l0.data());
  }
}
BENCHMARK(bm_assemble_split)->Arg(4)->Arg(10);

void bm_propagator_build(benchmark::State& state) {
  const PhysicalConstants c;
  const NvModel m =
      build_interaction_model(c, static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    Propagator prop(m);
    benchmark::DoNotOptimize(prop.dim());
  }
}
BENCHMARK(bm_propagator_build)->Arg(4)->Arg(10);

void bm_step(benchmark::State& state) {
  const PhysicalConstants c;
  const Propagator prop(
      build_interaction_model(c, static_cast<int>(state.range(0)), true));
  StepWorkspace ws = prop.make_workspace();
  Eigen::VectorXd r = prop.to_real(ground_start_state(prop.model()));
  for (auto _ : state) {
    prop.step(r, units::two_pi, 0.005, ws);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(bm_step)->Arg(4)->Arg(10);

void bm_transfer_window(benchmark::State& state) {
  const PhysicalConstants c;
  const Propagator prop(build_interaction_model(c, 10, true));
  ControlField f = gaussian_stirap(
      default_stirap_params(units::two_pi * 3.0, 1.0), 1.0, 0.005);
  bind_carriers(f, prop.model());
  const Eigen::MatrixXcd rho0 = ground_start_state(prop.model());
  for (auto _ : state) {
    const PhiParts parts = eval_phi(prop, f, rho0, {});
    benchmark::DoNotOptimize(parts.p3);
  }
}
BENCHMARK(bm_transfer_window);

void bm_gradient(benchmark::State& state) {
  const PhysicalConstants c;
  const Propagator prop(build_interaction_model(c, 10, true));
  ControlField f = gaussian_stirap(
      default_stirap_params(units::two_pi * 3.0, 1.0), 1.0, 0.005);
  bind_carriers(f, prop.model());
  GradientEngine eng(prop);
  const Eigen::VectorXd r0 = prop.to_real(ground_start_state(prop.model()));
  const TargetWeights w;
  for (auto _ : state) {
    eng.evaluate(f, r0, w);
    const GradientBundle g = eng.gradient(f, w);
    benchmark::DoNotOptimize(g.d_omega1.data());
  }
}
BENCHMARK(bm_gradient);

}  // namespace

BENCHMARK_MAIN();
