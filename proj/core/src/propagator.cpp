#include "nvopt/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace nvopt {

namespace {
const double sqrt2 = std::sqrt(2.0);

// v <- exp(a*dt) v with preallocated buffers; norm_bound >= ||a*dt||_1.
void expmv_buffered(const Eigen::MatrixXd& a, double dt, Eigen::VectorXd& v,
                    Eigen::VectorXd& term, Eigen::VectorXd& tmp,
                    double norm_bound, double tol) {
  if (norm_bound == 0.0) return;
  const int stages = std::max(1, static_cast<int>(std::ceil(norm_bound / 3.5)));
  const double h = dt / stages;
  for (int s = 0; s < stages; ++s) {
    term = v;
    double vmax = v.cwiseAbs().maxCoeff();
    for (int k = 1; k <= 64; ++k) {
      tmp.noalias() = a * term;
      term = tmp * (h / k);
      v += term;
      vmax = std::max(vmax, v.cwiseAbs().maxCoeff());
      if (term.cwiseAbs().maxCoeff() <= tol * vmax) break;
    }
  }
}
}  // namespace

Propagator::Propagator(const NvModel& model, double tol)
    : model_(model), split_(assemble_split(model)), d_(model.dims), tol_(tol) {
  const int dd = d_ * d_;
  // change of basis to the Hermitian coordinate system
  Eigen::MatrixXcd b(dd, dd);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d_, d_);
  int p = 0;
  for (int k = 0; k < d_; ++k) {
    f(k, k) = 1.0;
    b.col(p++) = vectorize(f);
    f(k, k) = 0.0;
  }
  const std::complex<double> ci(0.0, 1.0);
  for (int n = 1; n < d_; ++n) {
    for (int m = 0; m < n; ++m) {
      f(m, n) = 1.0 / sqrt2;
      f(n, m) = 1.0 / sqrt2;
      b.col(p++) = vectorize(f);
      f(m, n) = -ci / sqrt2;
      f(n, m) = ci / sqrt2;
      b.col(p++) = vectorize(f);
      f(m, n) = 0.0;
      f(n, m) = 0.0;
    }
  }
  m0_ = (b.adjoint() * split_.l0 * b).real();
  me_ = (b.adjoint() * split_.leps * b).real();
  m0t_ = m0_.transpose();
  met_ = me_.transpose();
  norm0_ = m0_.cwiseAbs().colwise().sum().maxCoeff();
  norme_ = me_.cwiseAbs().colwise().sum().maxCoeff();
}

Eigen::VectorXd Propagator::to_real(const Eigen::MatrixXcd& rho) const {
  if (rho.rows() != d_ || rho.cols() != d_)
    throw std::invalid_argument("to_real: dimension mismatch with model");
  Eigen::VectorXd r(vec_dim());
  int p = 0;
  for (int k = 0; k < d_; ++k) r[p++] = rho(k, k).real();
  for (int n = 1; n < d_; ++n) {
    for (int m = 0; m < n; ++m) {
      r[p++] = sqrt2 * rho(m, n).real();
      r[p++] = -sqrt2 * rho(m, n).imag();
    }
  }
  return r;
}

Eigen::MatrixXcd Propagator::to_matrix(const Eigen::VectorXd& r) const {
  Eigen::MatrixXcd rho(d_, d_);
  int p = 0;
  for (int k = 0; k < d_; ++k) rho(k, k) = r[p++];
  for (int n = 1; n < d_; ++n) {
    for (int m = 0; m < n; ++m) {
      const double re = r[p++] / sqrt2;
      const double im = -r[p++] / sqrt2;
      rho(m, n) = std::complex<double>(re, im);
      rho(n, m) = std::complex<double>(re, -im);
    }
  }
  return rho;
}

StepWorkspace Propagator::make_workspace() const {
  StepWorkspace ws;
  ws.gen.resize(vec_dim(), vec_dim());
  ws.term.resize(vec_dim());
  ws.tmp.resize(vec_dim());
  return ws;
}

void Propagator::step(Eigen::VectorXd& r, double eps, double dt,
                      StepWorkspace& ws) const {
  ws.gen = m0_;
  if (eps != 0.0) ws.gen += eps * me_;
  const double bound = (norm0_ + std::abs(eps) * norme_) * std::abs(dt);
  expmv_buffered(ws.gen, dt, r, ws.term, ws.tmp, bound, tol_);
}

void Propagator::step_adjoint(Eigen::VectorXd& w, double eps, double dt,
                              StepWorkspace& ws) const {
  ws.gen = m0t_;
  if (eps != 0.0) ws.gen += eps * met_;
  const double bound = (norm0_ + std::abs(eps) * norme_) * std::abs(dt);
  expmv_buffered(ws.gen, dt, w, ws.term, ws.tmp, bound, tol_);
}

void Propagator::apply_coupling(const Eigen::VectorXd& r,
                                Eigen::VectorXd& out) const {
  out.noalias() = me_ * r;
}

double Propagator::trace_of(const Eigen::VectorXd& r) const {
  return r.head(d_).sum();
}

Trajectory propagate_trajectory(const Propagator& prop,
                                const ControlField& field,
                                const Eigen::MatrixXcd& rho0,
                                std::span<const Level> record, int stride,
                                bool spectral_diagnostics) {
  const NvModel& m = prop.model();
  if (rho0.rows() != m.dims || rho0.cols() != m.dims)
    throw std::invalid_argument(
        "propagate_trajectory: initial state does not match model dims");
  std::vector<int> record_idx;
  for (Level k : record) {
    const int idx = m.index_of(k);
    if (idx < 0)
      throw std::invalid_argument(
          std::string("propagate_trajectory: level ") + level_label(k) +
          " is not part of this model");
    record_idx.push_back(idx);
  }
  if (stride < 1) stride = 1;

  const int n = field.n_segments();
  Trajectory out;
  out.recorded.assign(record.begin(), record.end());
  const int n_samples = 1 + (n + stride - 1) / stride;
  out.t.reserve(n_samples);
  out.trace.reserve(n_samples);
  out.populations.resize(n_samples, static_cast<Eigen::Index>(record_idx.size()));

  Eigen::VectorXd r = prop.to_real(rho0);
  StepWorkspace ws = prop.make_workspace();

  int row = 0;
  auto sample = [&](double t) {
    out.t.push_back(t);
    out.trace.push_back(prop.trace_of(r));
    for (std::size_t c = 0; c < record_idx.size(); ++c)
      out.populations(row, static_cast<Eigen::Index>(c)) = r[record_idx[c]];
    out.max_trace_drift =
        std::max(out.max_trace_drift, std::abs(out.trace.back() - 1.0));
    if (spectral_diagnostics) {
      const Eigen::MatrixXcd rho = prop.to_matrix(r);
      out.max_hermiticity_defect =
          std::max(out.max_hermiticity_defect,
                   (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          rho, Eigen::EigenvaluesOnly);
      out.min_eigenvalue =
          std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
    }
    ++row;
  };

  sample(0.0);
  for (int j = 1; j <= n; ++j) {
    prop.step(r, sample_eps(field, j), field.dt, ws);
    if (j % stride == 0 || j == n) sample(j * field.dt);
  }
  out.populations.conservativeResize(row, out.populations.cols());
  out.final_state = prop.to_matrix(r);
  return out;
}

Trajectory propagate_trajectory(const NvModel& model,
                                const ControlField& field,
                                const Eigen::MatrixXcd& rho0,
                                std::span<const Level> record, int stride) {
  Propagator prop(model);
  return propagate_trajectory(prop, field, rho0, record, stride);
}

}  // namespace nvopt
