#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvopt/constants.hpp"
#include "nvopt/pulses.hpp"

namespace nvopt {

// File-facing values stay in the units they are written in (GHz, ns) and are
// converted at the point of use, so emitting and re-parsing a config is
// lossless.
struct ConstantsConfig {
  double d_gs_ghz = 2.88;
  double g_gs = 2.01;
  double d_es_ghz = 1.42;
  double delta_ss_ghz = 1.55;
  double delta_pp_ghz = 0.2;
  double l_z_ghz = 5.3;
  double g_es = 2.01;
  double e_g_thz = 470.0;
  double zeeman_gs_ghz = default_zeeman_ghz;
  double zeeman_es_ghz = default_zeeman_ghz;

  PhysicalConstants to_physical() const;  // splittings always carry the 2*pi
};

struct ExperimentConfig {
  std::string kind = "optimize";  // simulate | stirap-scan | optimize |
                                  // robustness | resolution | dt-convergence
  std::string label;              // output subdirectory; defaults to kind
  int dims = 10;
  bool dissipation = true;
  std::vector<double> T_ns = {1.0};
  std::vector<double> amplitudes_ghz = {0.2, 0.5, 1.0, 3.0, 5.0, 7.0, 9.0};
  std::vector<std::string> methods = {"adiabatic-nm", "adiabatic-grape",
                                      "rabi-resonant", "rabi-detuning"};
  int n_restarts = 500;
  std::uint64_t seed = 1;
  double resolution_ns = 0.0;  // 0 means one block per segment
  double lambda = 0.0;
  double lambda_energy = 0.0;
  // gradient ascent knobs
  double step_eps = 20.0;
  int max_iters = 2000;
  int convergence_window = 100;
  double convergence_tol = 1e-3;
  double amplitude_cap_ghz = 12.0;
  bool clamp_nonnegative = false;
  // simplex knobs
  int nm_max_evals = 400;
  double nm_stall_tol = 1e-6;
  // robustness grid
  double grid_amp_min = -0.10;
  double grid_amp_max = 0.10;
  int grid_amp_points = 21;
  double grid_det_min_ghz = -0.2;
  double grid_det_max_ghz = 0.2;
  int grid_det_points = 21;
  // dt ladder for convergence studies
  std::vector<double> dt_ladder_ns = {0.02, 0.01, 0.005, 0.0025};
};

struct Config {
  ConstantsConfig constants;
  double dt_ns = 0.005;
  // Laser amplitude and detuning entries are taken at face value in rad/ns
  // under "plain"; "angular" multiplies them by 2*pi like the Hamiltonian
  // constants. The reference transfer fidelities calibrate to plain.
  std::string amplitude_convention = "plain";  // or "angular"
  std::string sampling = "average";            // or "midpoint", "left-edge"
  std::string output_dir = "out";
  int workers = 0;  // 0: use hardware concurrency
  std::vector<ExperimentConfig> experiments;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Strict parse: every violation (unknown key, wrong type, bad value) is
// collected and reported together in the thrown ConfigError.
Config parse_config(const std::string& path);
Config config_from_json(const nlohmann::json& j);

// Canonical echo of the effective configuration (defaults filled in).
nlohmann::json effective_config_json(const Config& c);

// FNV-1a over the canonical serialization; embedded in every output file.
std::uint64_t config_hash(const Config& c);
std::string config_hash_hex(const Config& c);

units::AmplitudeConvention convention_of(const Config& c);
SegmentSampling sampling_of(const Config& c);

}  // namespace nvopt
