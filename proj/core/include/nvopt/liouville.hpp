#pragma once

#include <Eigen/Dense>

#include "nvopt/model.hpp"

namespace nvopt {

// Column-major stacking: component l = n*d + m holds rho(m, n), so the
// vectorized basis matrix |m><n| has a single 1 at that slot.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v);

// Right-hand side of the master equation at unit time: commutator with the
// static Hamiltonian plus the decay channels. Linear in rho (the dissipator
// is taken in its complex-linear form, which agrees with the Hermitian
//-conjugate form on Hermitian arguments).
Eigen::MatrixXcd master_rhs(const NvModel& m, const Eigen::MatrixXcd& rho);

// rho -> -i [v_pattern, rho], the drive direction at unit field amplitude.
Eigen::MatrixXcd coupling_rhs(const NvModel& m, const Eigen::MatrixXcd& rho);

struct LiouvillianSplit {
  Eigen::MatrixXcd l0;    // drift + dissipators
  Eigen::MatrixXcd leps;  // coupling per unit field amplitude
};

// Builds both generators by probing the maps column-by-column on |m><n|.
LiouvillianSplit assemble_split(const NvModel& m);

// v <- exp(a*t) v by scaled truncated Taylor series; tol is relative to the
// running result in the max norm.
void expmv_inplace(const Eigen::MatrixXd& a, double t, Eigen::VectorXd& v,
                   double tol = 1e-13);
void expmv_inplace(const Eigen::MatrixXcd& a, double t, Eigen::VectorXcd& v,
                   double tol = 1e-13);

// exp((L0 + Leps*eps_value)*dt) applied to a vectorized state.
Eigen::VectorXcd step_propagate(const Eigen::VectorXcd& rho_vec,
                                const LiouvillianSplit& l, double eps_value,
                                double dt);

// Real part of a diagonal entry, by basis position.
double population(const Eigen::MatrixXcd& rho, int k);

}  // namespace nvopt
