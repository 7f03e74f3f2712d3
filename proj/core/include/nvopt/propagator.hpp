#pragma once

#include <span>
#include <vector>

#include "nvopt/liouville.hpp"
#include "nvopt/pulses.hpp"

namespace nvopt {

// Scratch buffers so that stepping never allocates in inner loops.
struct StepWorkspace {
  Eigen::MatrixXd gen;
  Eigen::VectorXd term;
  Eigen::VectorXd tmp;
};

// Propagation engine. Internally the Lindblad generator is expressed in an
// orthonormal real basis of Hermitian matrices (unit diagonals, symmetric and
// antisymmetric off-diagonal pairs), which keeps states Hermitian by
// construction and halves the arithmetic of every superoperator application.
// The Hilbert-Schmidt adjoint is then a plain matrix transpose.
class Propagator {
 public:
  explicit Propagator(const NvModel& model, double tol = 1e-13);

  const NvModel& model() const { return model_; }
  const LiouvillianSplit& split() const { return split_; }
  int dim() const { return d_; }
  int vec_dim() const { return d_ * d_; }

  // Coordinates: r[k] = rho(k,k) for k < dim, then per off-diagonal pair
  // (m < n) the pair (sqrt2*Re rho(m,n), -sqrt2*Im rho(m,n)).
  Eigen::VectorXd to_real(const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd to_matrix(const Eigen::VectorXd& r) const;

  const Eigen::MatrixXd& gen_static() const { return m0_; }
  const Eigen::MatrixXd& gen_coupling() const { return me_; }

  StepWorkspace make_workspace() const;

  // r <- exp((M0 + eps*Me) dt) r
  void step(Eigen::VectorXd& r, double eps, double dt,
            StepWorkspace& ws) const;
  // w <- exp((M0 + eps*Me)^T dt) w
  void step_adjoint(Eigen::VectorXd& w, double eps, double dt,
                    StepWorkspace& ws) const;
  // out = Me * r
  void apply_coupling(const Eigen::VectorXd& r, Eigen::VectorXd& out) const;

  double trace_of(const Eigen::VectorXd& r) const;
  double population_of(const Eigen::VectorXd& r, int k) const { return r[k]; }

 private:
  NvModel model_;
  LiouvillianSplit split_;
  Eigen::MatrixXd m0_, me_, m0t_, met_;
  double norm0_ = 0.0, norme_ = 0.0;  // 1-norms for stage selection
  int d_ = 0;
  double tol_ = 1e-13;
};

struct Trajectory {
  std::vector<double> t;          // sample times, starting at 0
  std::vector<Level> recorded;    // population columns
  Eigen::MatrixXd populations;    // (samples, recorded levels)
  std::vector<double> trace;      // per sample
  Eigen::MatrixXcd final_state;
  double max_trace_drift = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 1.0;
};

// Steps through all segments of the field, recording every `stride`-th state
// (plus the initial and final ones). Spectral diagnostics are evaluated at
// the recorded samples.
Trajectory propagate_trajectory(const Propagator& prop,
                                const ControlField& field,
                                const Eigen::MatrixXcd& rho0,
                                std::span<const Level> record, int stride = 1,
                                bool spectral_diagnostics = true);

Trajectory propagate_trajectory(const NvModel& model,
                                const ControlField& field,
                                const Eigen::MatrixXcd& rho0,
                                std::span<const Level> record, int stride = 1);

}  // namespace nvopt
