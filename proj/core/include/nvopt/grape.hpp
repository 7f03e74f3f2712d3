#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvopt/propagator.hpp"

namespace nvopt {

// phi = p3 + lambda * p4bar + lambda_energy * E, where p3 is the final
// target-state population, p4bar the path-averaged intermediate-state
// population, and E the summed squared envelope.
struct TargetWeights {
  double lambda = 0.0;         // <= 0 penalizes intermediate occupation
  double lambda_energy = 0.0;  // <= 0 penalizes control power
};

struct PhiParts {
  double phi = 0.0;
  double p3 = 0.0;
  double p4bar = 0.0;
  double energy = 0.0;
};

struct GradientBundle {
  Eigen::ArrayXd d_omega1;  // one entry per envelope block
  Eigen::ArrayXd d_omega2;
  double d_delta = 0.0;
};

struct GrapeConfig {
  double step_eps = 20.0;  // initial ascent step
  int max_iters = 2000;
  int convergence_window = 100;
  double convergence_tol = 1e-3;
  bool optimize_detuning = false;
  double amplitude_cap = 12.0;  // rad/ns
  bool clamp_nonnegative = false;
  double step_floor = 1e-12;
  double step_growth = 1.2;
};

struct OptimizationRun {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<double> phi_history;  // accepted value per iteration
  ControlField best_field;
  double phi = 0.0;
  double p3 = 0.0;
  double p4bar = 0.0;
  double energy = 0.0;
  double max_amplitude = 0.0;
  int iters = 0;
  double wall_time_s = 0.0;
};

// Forward propagation with per-segment checkpoints plus adjoint backward
// sweeps; one instance per optimization run (owns the checkpoint storage).
class GradientEngine {
 public:
  GradientEngine(const Propagator& prop, Level target = Level::plus_one,
                 Level costly = Level::a2);

  // Runs the forward pass, caching all states for a later gradient() call.
  PhiParts evaluate(const ControlField& f, const Eigen::VectorXd& r0,
                    const TargetWeights& w);
  // Gradient of phi at the field of the last evaluate().
  GradientBundle gradient(const ControlField& f, const TargetWeights& w);

  // Individual backward sweeps, exposed for verification.
  GradientBundle gradient_p3(const ControlField& f);
  GradientBundle gradient_p4bar(const ControlField& f);

  const Eigen::MatrixXd& checkpoints() const { return states_; }
  const Propagator& propagator() const { return *prop_; }

 private:
  GradientBundle sweep(const ControlField& f, bool with_p3, bool with_p4,
                       double scale_p3, double scale_p4);

  const Propagator* prop_;
  int target_idx_;
  int costly_idx_;
  Eigen::MatrixXd states_;  // column j = state after segment j
  int n_cached_ = 0;
  StepWorkspace ws_;
  Eigen::VectorXd w_, s_, u_;
};

PhiParts eval_phi(const Propagator& prop, const ControlField& f,
                  const Eigen::MatrixXcd& rho0, const TargetWeights& w);

GradientBundle grad_p3(const Propagator& prop, const ControlField& f,
                       const Eigen::MatrixXcd& rho0);
GradientBundle grad_p4bar(const Propagator& prop, const ControlField& f,
                          const Eigen::MatrixXcd& rho0);
// d E / d Omega_i(block) = sum over the block's segments of 2 Omega_i(j);
// no detuning dependence.
GradientBundle grad_energy(const ControlField& f);

// Gradient ascent with a backtracking step size: halve on a rejected trial,
// grow by step_growth on acceptance. Stops when the trailing-window phi gain
// falls below convergence_tol, when max_iters is reached, or when the step
// hits step_floor.
OptimizationRun grape_optimize(const Propagator& prop,
                               const ControlField& field0,
                               const Eigen::MatrixXcd& rho0,
                               const TargetWeights& w, const GrapeConfig& cfg,
                               const std::string& method_name = "grape",
                               std::uint64_t seed = 0);

}  // namespace nvopt
