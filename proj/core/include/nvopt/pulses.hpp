#pragma once

#include <Eigen/Dense>

#include "nvopt/model.hpp"

namespace nvopt {

// How the piecewise-constant value of segment j represents the drive over
// [(j-1)*dt, j*dt]. The default holds the exact mean of each carrier tone
// (the midpoint cosine scaled by sinc(carrier*dt/2)); midpoint and left_edge
// hold the raw cosine at the named instant and exist for ablation.
enum class SegmentSampling { average, midpoint, left_edge };

// Two-tone piecewise-constant control. Envelopes are stored per segment but
// held constant over blocks of resolution/dt segments; the carriers advance
// every segment.
struct ControlField {
  Eigen::ArrayXd omega1;  // envelope of the tone near delta1, rad/ns
  Eigen::ArrayXd omega2;  // envelope of the tone near delta2, rad/ns
  double delta1 = 0.0;    // carrier angular frequencies, rad/ns
  double delta2 = 0.0;
  double delta_global = 0.0;  // common detuning added to both carriers
  double dt = 0.005;          // segment length, ns
  double resolution = 0.005;  // envelope hold length, ns (multiple of dt)
  double T = 0.0;             // total duration, ns
  SegmentSampling sampling = SegmentSampling::average;

  int n_segments() const { return static_cast<int>(omega1.size()); }
  int block_size() const;  // segments per envelope block
  int n_blocks() const { return n_segments() / block_size(); }
};

// Number of segments implied by T and dt; throws unless T/dt is an integer
// to within 1e-9 relative.
int segment_count(double T, double dt);

// Sampling time of segment j (1-based) under the field's convention.
double segment_time(const ControlField& f, int j);

// Scale applied to a tone's cosine so the held segment value matches the
// sampling convention: sinc(carrier*dt/2) under average, 1 otherwise.
double carrier_gain(const ControlField& f, double carrier);

// Derivative of carrier_gain with respect to the carrier frequency.
double carrier_gain_slope(const ControlField& f, double carrier);

// Full drive value of segment j: sum over tones of
// omega_i(j) carrier_gain(delta_i+Delta) cos[(delta_i+Delta) t_j].
double sample_eps(const ControlField& f, int j);

// Copies the resonant carrier frequencies out of a model.
void bind_carriers(ControlField& f, const NvModel& m);

struct GaussianParams {
  double a = 0.0;  // peak amplitude, rad/ns
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  double sigma = 1.0;
};

// sigma = T/10, mu_{+,-} = T/2 +- sigma: the late omega1 / early omega2
// ordering that moves population from |-1> to |+1>.
GaussianParams default_stirap_params(double a, double T);

ControlField gaussian_stirap(const GaussianParams& p, double T, double dt,
                             SegmentSampling sampling = SegmentSampling::average);

// Constant equal-amplitude envelopes on both tones.
ControlField constant_field(double a, double T, double dt,
                            SegmentSampling sampling = SegmentSampling::average);

// Common-mode relative amplitude error and additive carrier detuning offset.
ControlField perturb(const ControlField& f, double d_omega_rel,
                     double d_delta);

// Average the envelopes over blocks of new_resolution/dt segments and hold.
ControlField rebin(const ControlField& f, double new_resolution);

// Sum over segments of omega1^2 + omega2^2.
double field_energy(const ControlField& f);

double max_amplitude(const ControlField& f);

}  // namespace nvopt
