#include "nvopt/pulses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nvopt {

int segment_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("segment_count: T and dt must be positive");
  const double ratio = T / dt;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("segment_count: T = " + std::to_string(T) +
                                " is not an integer multiple of dt = " +
                                std::to_string(dt));
  return n;
}

int ControlField::block_size() const {
  const double ratio = resolution / dt;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(
        "resolution must be an integer multiple of dt");
  return n;
}

double segment_time(const ControlField& f, int j) {
  return f.sampling == SegmentSampling::left_edge ? (j - 1) * f.dt
                                                  : (j - 0.5) * f.dt;
}

namespace {
double sinc(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-2) return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  return std::sin(x) / x;
}

double sinc_slope(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-2) return x * (-1.0 / 3.0 + x2 / 30.0);
  return (std::cos(x) - std::sin(x) / x) / x;
}
}  // namespace

double carrier_gain(const ControlField& f, double carrier) {
  if (f.sampling != SegmentSampling::average) return 1.0;
  return sinc(0.5 * carrier * f.dt);
}

double carrier_gain_slope(const ControlField& f, double carrier) {
  if (f.sampling != SegmentSampling::average) return 0.0;
  return 0.5 * f.dt * sinc_slope(0.5 * carrier * f.dt);
}

double sample_eps(const ControlField& f, int j) {
  const double t = segment_time(f, j);
  const double c1 = f.delta1 + f.delta_global;
  const double c2 = f.delta2 + f.delta_global;
  return f.omega1[j - 1] * carrier_gain(f, c1) * std::cos(c1 * t) +
         f.omega2[j - 1] * carrier_gain(f, c2) * std::cos(c2 * t);
}

void bind_carriers(ControlField& f, const NvModel& m) {
  f.delta1 = m.delta1;
  f.delta2 = m.delta2;
}

GaussianParams default_stirap_params(double a, double T) {
  GaussianParams p;
  p.a = a;
  p.sigma = T / 10.0;
  p.mu_plus = T / 2.0 + p.sigma;
  p.mu_minus = T / 2.0 - p.sigma;
  return p;
}

namespace {
ControlField empty_field(double T, double dt, SegmentSampling sampling) {
  ControlField f;
  const int n = segment_count(T, dt);
  f.omega1 = Eigen::ArrayXd::Zero(n);
  f.omega2 = Eigen::ArrayXd::Zero(n);
  f.dt = dt;
  f.resolution = dt;
  f.T = T;
  f.sampling = sampling;
  return f;
}
}  // namespace

ControlField gaussian_stirap(const GaussianParams& p, double T, double dt,
                             SegmentSampling sampling) {
  if (!(p.sigma > 0.0))
    throw std::invalid_argument("gaussian_stirap: sigma must be positive");
  ControlField f = empty_field(T, dt, sampling);
  for (int j = 1; j <= f.n_segments(); ++j) {
    const double t = segment_time(f, j);
    const double x1 = (t - p.mu_plus) / p.sigma;
    const double x2 = (t - p.mu_minus) / p.sigma;
    f.omega1[j - 1] = p.a * std::exp(-0.5 * x1 * x1);
    f.omega2[j - 1] = p.a * std::exp(-0.5 * x2 * x2);
  }
  return f;
}

ControlField constant_field(double a, double T, double dt,
                            SegmentSampling sampling) {
  ControlField f = empty_field(T, dt, sampling);
  f.omega1.setConstant(a);
  f.omega2.setConstant(a);
  return f;
}

ControlField perturb(const ControlField& f, double d_omega_rel,
                     double d_delta) {
  if (1.0 + d_omega_rel < 0.0)
    throw std::invalid_argument("perturb: amplitude scale would be negative");
  ControlField out = f;
  out.omega1 *= (1.0 + d_omega_rel);
  out.omega2 *= (1.0 + d_omega_rel);
  out.delta_global += d_delta;
  return out;
}

ControlField rebin(const ControlField& f, double new_resolution) {
  const double ratio = new_resolution / f.dt;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(
        "rebin: resolution is not an integer multiple of dt");
  const int ns = f.n_segments();
  if (ns % n != 0)
    throw std::invalid_argument(
        "rebin: segment count is not divisible by the block size");
  ControlField out = f;
  out.resolution = new_resolution;
  for (int b = 0; b < ns / n; ++b) {
    out.omega1.segment(b * n, n).setConstant(
        f.omega1.segment(b * n, n).mean());
    out.omega2.segment(b * n, n).setConstant(
        f.omega2.segment(b * n, n).mean());
  }
  return out;
}

double field_energy(const ControlField& f) {
  return (f.omega1.square() + f.omega2.square()).sum();
}

double max_amplitude(const ControlField& f) {
  return std::max(f.omega1.abs().maxCoeff(), f.omega2.abs().maxCoeff());
}

}  // namespace nvopt
