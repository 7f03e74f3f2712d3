#pragma once

#include <numbers>

// Internal unit system: time in ns, frequencies/energies in rad/ns (angular).
// A quantity quoted as "f GHz" enters the Hamiltonian as 2*pi*f rad/ns under
// the angular convention; the plain convention takes the number at face value
// (f rad/ns), which some sources use for Rabi amplitudes.

namespace nvopt::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class AmplitudeConvention { angular, plain };

constexpr double ghz_to_rad_ns(double f_ghz,
                               AmplitudeConvention c = AmplitudeConvention::angular) {
  return c == AmplitudeConvention::angular ? two_pi * f_ghz : f_ghz;
}

constexpr double rad_ns_to_ghz(double w,
                               AmplitudeConvention c = AmplitudeConvention::angular) {
  return c == AmplitudeConvention::angular ? w / two_pi : w;
}

constexpr const char* convention_name(AmplitudeConvention c) {
  return c == AmplitudeConvention::angular ? "angular" : "plain";
}

}  // namespace nvopt::units
