#include "nvopt/grape.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nvopt {

namespace {
int required_index(const NvModel& m, Level k) {
  const int idx = m.index_of(k);
  if (idx < 0)
    throw std::invalid_argument(std::string("model does not contain level ") +
                                level_label(k));
  return idx;
}

void clamp_blocks(ControlField& f, const GrapeConfig& cfg) {
  const double lo = cfg.clamp_nonnegative ? 0.0 : -cfg.amplitude_cap;
  f.omega1 = f.omega1.max(lo).min(cfg.amplitude_cap);
  f.omega2 = f.omega2.max(lo).min(cfg.amplitude_cap);
}

ControlField apply_update(const ControlField& f, const GradientBundle& g,
                          double step, const GrapeConfig& cfg) {
  ControlField out = f;
  const int bs = f.block_size();
  const double lo = cfg.clamp_nonnegative ? 0.0 : -cfg.amplitude_cap;
  for (int b = 0; b < f.n_blocks(); ++b) {
    const double w1 = std::clamp(f.omega1[b * bs] + step * g.d_omega1[b], lo,
                                 cfg.amplitude_cap);
    const double w2 = std::clamp(f.omega2[b * bs] + step * g.d_omega2[b], lo,
                                 cfg.amplitude_cap);
    out.omega1.segment(b * bs, bs).setConstant(w1);
    out.omega2.segment(b * bs, bs).setConstant(w2);
  }
  if (cfg.optimize_detuning)
    out.delta_global = f.delta_global + step * g.d_delta;
  return out;
}
}  // namespace

GradientEngine::GradientEngine(const Propagator& prop, Level target,
                               Level costly)
    : prop_(&prop),
      target_idx_(required_index(prop.model(), target)),
      costly_idx_(required_index(prop.model(), costly)),
      ws_(prop.make_workspace()),
      w_(prop.vec_dim()),
      s_(prop.vec_dim()),
      u_(prop.vec_dim()) {}

PhiParts GradientEngine::evaluate(const ControlField& f,
                                  const Eigen::VectorXd& r0,
                                  const TargetWeights& w) {
  const int n = f.n_segments();
  if (states_.cols() < n + 1 || states_.rows() != prop_->vec_dim())
    states_.resize(prop_->vec_dim(), n + 1);
  states_.col(0) = r0;
  Eigen::VectorXd r = r0;
  double p4sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    prop_->step(r, sample_eps(f, j), f.dt, ws_);
    states_.col(j) = r;
    p4sum += r[costly_idx_];
  }
  n_cached_ = n;
  PhiParts parts;
  parts.p3 = r[target_idx_];
  parts.p4bar = p4sum / n;
  parts.energy = field_energy(f);
  parts.phi =
      parts.p3 + w.lambda * parts.p4bar + w.lambda_energy * parts.energy;
  return parts;
}

// One backward pass over the cached forward states. The final-state adjoint
// picks up one propagator transpose per segment; the path-average adjoint
// additionally re-injects the projector each segment, which reproduces the
// partial-sum (stairway) product without ever forming operator products.
GradientBundle GradientEngine::sweep(const ControlField& f, bool with_p3,
                                     bool with_p4, double scale_p3,
                                     double scale_p4) {
  const int n = f.n_segments();
  if (n != n_cached_)
    throw std::logic_error("gradient requested without a matching forward pass");
  const int bs = f.block_size();
  const double dt = f.dt;
  GradientBundle g;
  g.d_omega1 = Eigen::ArrayXd::Zero(f.n_blocks());
  g.d_omega2 = Eigen::ArrayXd::Zero(f.n_blocks());
  if (with_p3) {
    w_.setZero();
    w_[target_idx_] = 1.0;
  }
  if (with_p4) {
    s_.setZero();
    s_[costly_idx_] = 1.0;
  }
  const double carrier1 = f.delta1 + f.delta_global;
  const double carrier2 = f.delta2 + f.delta_global;
  const double a1 = carrier_gain(f, carrier1);
  const double a2 = carrier_gain(f, carrier2);
  const double s1 = carrier_gain_slope(f, carrier1);
  const double s2 = carrier_gain_slope(f, carrier2);
  for (int j = n; j >= 1; --j) {
    const double tj = segment_time(f, j);
    u_.noalias() = prop_->gen_coupling() * states_.col(j);
    double gp = 0.0;
    if (with_p3) gp += scale_p3 * dt * w_.dot(u_);
    if (with_p4) gp += scale_p4 * (dt / n) * s_.dot(u_);
    const int b = (j - 1) / bs;
    g.d_omega1[b] += gp * a1 * std::cos(carrier1 * tj);
    g.d_omega2[b] += gp * a2 * std::cos(carrier2 * tj);
    g.d_delta +=
        gp * (f.omega1[j - 1] * (s1 * std::cos(carrier1 * tj) -
                                 a1 * std::sin(carrier1 * tj) * tj) +
              f.omega2[j - 1] * (s2 * std::cos(carrier2 * tj) -
                                 a2 * std::sin(carrier2 * tj) * tj));
    const double eps_j = sample_eps(f, j);
    if (with_p3) prop_->step_adjoint(w_, eps_j, dt, ws_);
    if (with_p4) {
      prop_->step_adjoint(s_, eps_j, dt, ws_);
      s_[costly_idx_] += 1.0;
    }
  }
  return g;
}

GradientBundle GradientEngine::gradient(const ControlField& f,
                                        const TargetWeights& w) {
  GradientBundle g = sweep(f, true, w.lambda != 0.0, 1.0, w.lambda);
  if (w.lambda_energy != 0.0) {
    const GradientBundle ge = grad_energy(f);
    g.d_omega1 += w.lambda_energy * ge.d_omega1;
    g.d_omega2 += w.lambda_energy * ge.d_omega2;
  }
  return g;
}

GradientBundle GradientEngine::gradient_p3(const ControlField& f) {
  return sweep(f, true, false, 1.0, 0.0);
}

GradientBundle GradientEngine::gradient_p4bar(const ControlField& f) {
  return sweep(f, false, true, 0.0, 1.0);
}

PhiParts eval_phi(const Propagator& prop, const ControlField& f,
                  const Eigen::MatrixXcd& rho0, const TargetWeights& w) {
  const int target = required_index(prop.model(), Level::plus_one);
  const int costly = required_index(prop.model(), Level::a2);
  StepWorkspace ws = prop.make_workspace();
  Eigen::VectorXd r = prop.to_real(rho0);
  const int n = f.n_segments();
  double p4sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    prop.step(r, sample_eps(f, j), f.dt, ws);
    p4sum += r[costly];
  }
  PhiParts parts;
  parts.p3 = r[target];
  parts.p4bar = p4sum / n;
  parts.energy = field_energy(f);
  parts.phi =
      parts.p3 + w.lambda * parts.p4bar + w.lambda_energy * parts.energy;
  return parts;
}

GradientBundle grad_p3(const Propagator& prop, const ControlField& f,
                       const Eigen::MatrixXcd& rho0) {
  GradientEngine engine(prop);
  engine.evaluate(f, prop.to_real(rho0), {});
  return engine.gradient_p3(f);
}

GradientBundle grad_p4bar(const Propagator& prop, const ControlField& f,
                          const Eigen::MatrixXcd& rho0) {
  GradientEngine engine(prop);
  engine.evaluate(f, prop.to_real(rho0), {});
  return engine.gradient_p4bar(f);
}

GradientBundle grad_energy(const ControlField& f) {
  const int bs = f.block_size();
  GradientBundle g;
  g.d_omega1 = Eigen::ArrayXd::Zero(f.n_blocks());
  g.d_omega2 = Eigen::ArrayXd::Zero(f.n_blocks());
  for (int b = 0; b < f.n_blocks(); ++b) {
    g.d_omega1[b] = 2.0 * f.omega1.segment(b * bs, bs).sum();
    g.d_omega2[b] = 2.0 * f.omega2.segment(b * bs, bs).sum();
  }
  g.d_delta = 0.0;
  return g;
}

OptimizationRun grape_optimize(const Propagator& prop,
                               const ControlField& field0,
                               const Eigen::MatrixXcd& rho0,
                               const TargetWeights& w, const GrapeConfig& cfg,
                               const std::string& method_name,
                               std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  GradientEngine engine(prop);
  const Eigen::VectorXd r0 = prop.to_real(rho0);

  ControlField f = field0;
  clamp_blocks(f, cfg);
  PhiParts parts = engine.evaluate(f, r0, w);
  if (!std::isfinite(parts.phi))
    throw std::runtime_error("gradient ascent: initial objective not finite");

  OptimizationRun run;
  run.method = method_name;
  run.seed = seed;
  run.phi_history.push_back(parts.phi);

  double step = cfg.step_eps;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const GradientBundle g = engine.gradient(f, w);
    bool accepted = false;
    while (step >= cfg.step_floor) {
      ControlField trial = apply_update(f, g, step, cfg);
      const PhiParts tp = engine.evaluate(trial, r0, w);
      if (!std::isfinite(tp.phi))
        throw std::runtime_error(
            "gradient ascent: objective became non-finite at iteration " +
            std::to_string(iter) + " (step " + std::to_string(step) + ")");
      if (tp.phi >= parts.phi) {
        f = std::move(trial);
        parts = tp;
        step *= cfg.step_growth;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search exhausted, no ascent direction left
    run.phi_history.push_back(parts.phi);
    const std::size_t wdw = static_cast<std::size_t>(cfg.convergence_window);
    if (run.phi_history.size() > wdw &&
        run.phi_history.back() -
                run.phi_history[run.phi_history.size() - 1 - wdw] <
            cfg.convergence_tol)
      break;
  }

  run.best_field = f;
  run.phi = parts.phi;
  run.p3 = parts.p3;
  run.p4bar = parts.p4bar;
  run.energy = parts.energy;
  run.max_amplitude = max_amplitude(f);
  run.iters = static_cast<int>(run.phi_history.size()) - 1;
  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return run;
}

}  // namespace nvopt
