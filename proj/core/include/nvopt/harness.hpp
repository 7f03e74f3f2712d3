#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "nvopt/grape.hpp"
#include "nvopt/simplex.hpp"
#include "nvopt/units.hpp"

namespace nvopt {

enum class Method {
  adiabatic_nm,
  adiabatic_grape,
  rabi_resonant,
  rabi_detuning,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

// Restart-level random source. The generator and the uniform mapping are
// pinned (mt19937_64, 53-bit mantissa scaling) so that runs reproduce
// bit-for-bit across platforms.
class RestartRng {
 public:
  explicit RestartRng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

 private:
  std::mt19937_64 gen_;
};

// Runs job(0..n-1) on up to `workers` threads (all inline when workers <= 1).
// Jobs must write only to their own result slot.
void parallel_for_index(int n, int workers,
                        const std::function<void(int)>& job);

// |-1><-1| in the basis of the given model.
Eigen::MatrixXcd ground_start_state(const NvModel& m);

struct StirapScanSpec {
  std::vector<double> amplitudes;  // rad/ns
  std::vector<double> T_list;      // ns
  double dt = 0.005;
  SegmentSampling sampling = SegmentSampling::average;
};

struct StirapRow {
  int dims;
  bool dissipation;
  double a;   // rad/ns
  double T;   // ns
  double p3;  // final target population
};

// Gaussian STIRAP defaults over the four model variants (4- and 10-level,
// with and without dissipation) on the amplitude x duration grid.
std::vector<StirapRow> run_stirap_scan(const PhysicalConstants& c,
                                       const StirapScanSpec& spec,
                                       int workers);

struct RaceSpec {
  int dims = 10;
  bool dissipation = true;
  double T = 1.0;
  double dt = 0.005;
  double resolution = 0.0;  // 0 means dt
  std::vector<Method> methods = {Method::adiabatic_nm, Method::adiabatic_grape,
                                 Method::rabi_resonant, Method::rabi_detuning};
  int n_restarts = 50;
  std::uint64_t seed = 1;
  TargetWeights weights;
  GrapeConfig grape;
  int nm_max_evals = 400;
  double nm_stall_tol = 1e-6;
  // Initialization boxes. The reference race draws starting amplitudes and
  // detunings up to 3 GHz, i.e. 2*pi*3 rad/ns; at T = 1 ns anything much
  // smaller leaves the simplex method short of a full transfer pulse area.
  double gauss_amp_max = units::two_pi * 3.0;  // rad/ns
  double rabi_amp_max = units::two_pi * 3.0;
  double detuning_max = units::two_pi * 3.0;
  SegmentSampling sampling = SegmentSampling::average;
};

struct MethodRace {
  Method method;
  double T = 0.0;
  std::vector<OptimizationRun> runs;  // index = restart
  int best_index = 0;                 // highest p3; earliest seed on ties
};

// Independent restarts per method, each seeded with spec.seed + restart
// index; results merged by index so the outcome is order-independent.
std::vector<MethodRace> run_optimization_race(const PhysicalConstants& c,
                                              const RaceSpec& spec,
                                              int workers);

// One restart of one strategy (exposed for tests and the race).
OptimizationRun run_single_restart(const Propagator& prop, Method method,
                                   const RaceSpec& spec,
                                   std::uint64_t restart_seed);

struct RobustnessGrid {
  double amp_min = -0.10;  // relative amplitude error
  double amp_max = 0.10;
  int amp_points = 21;
  double det_min = -0.2;  // rad/ns common carrier offset
  double det_max = 0.2;
  int det_points = 21;
};

// Final target population over the (amplitude error, detuning offset) grid;
// rows follow the amplitude axis.
Eigen::MatrixXd run_robustness_map(const Propagator& prop,
                                   const ControlField& field,
                                   const Eigen::MatrixXcd& rho0,
                                   const RobustnessGrid& grid, int workers);

struct DtConvergenceRow {
  double dt;
  double p3;
  double diff_from_prev;  // 0 for the first row
};

struct DtConvergenceResult {
  std::vector<DtConvergenceRow> rows;
  bool monotone = true;  // successive |differences| non-increasing
};

// Gaussian STIRAP defaults at fixed (a, T) swept over a dt ladder.
DtConvergenceResult run_dt_convergence(const PhysicalConstants& c,
                                       const std::vector<double>& dt_ladder,
                                       double a, double T, int dims,
                                       bool dissipation,
                                       SegmentSampling sampling);

}  // namespace nvopt
