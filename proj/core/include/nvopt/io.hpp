#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "nvopt/grape.hpp"
#include "nvopt/harness.hpp"
#include "nvopt/propagator.hpp"

namespace nvopt {

inline constexpr const char* nvopt_version = "0.1.0";

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Pulse (de)serialization. Envelope values and the detuning are written in
// the stated convention's GHz and the convention is recorded in the file.
// The plain convention stores internal values verbatim, so plain files
// round-trip bit-exactly; machine-facing outputs use it. Angular files
// divide by 2*pi for display parity and may differ by one ulp on reload.
nlohmann::json pulse_to_json(const ControlField& f,
                             units::AmplitudeConvention conv);
ControlField pulse_from_json(const nlohmann::json& j);

nlohmann::json run_to_json(const OptimizationRun& run,
                           units::AmplitudeConvention conv);

// Trajectory CSV: comment header lines, then
// t_ns,P_...,...,trace rows at the recorded samples.
void write_trajectory_csv(const std::string& path, const Trajectory& tr,
                          const std::string& config_hash_hex,
                          units::AmplitudeConvention conv);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace nvopt
