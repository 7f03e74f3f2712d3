#pragma once

#include <string>
#include <vector>

#include "nvopt/units.hpp"

namespace nvopt {

// Zeeman shift g*muB*Bz in GHz for g = 2.01, muB = 13.996245 GHz/T and
// Bz = 20 mT, the axial field the dissipative-transfer references were
// calibrated against.
inline constexpr double default_zeeman_ghz = 0.5626490464;

// Room-temperature NV center model parameters. All splittings are angular
// frequencies in rad/ns; g factors are dimensionless. The Zeeman shifts
// g*muB*Bz are kept per manifold so the two g factors can be detuned
// independently of the field strength.
struct PhysicalConstants {
  double d_gs = units::two_pi * 2.88;     // ground-state zero-field splitting
  double g_gs = 2.01;                     // ground-state g factor
  double d_es = units::two_pi * 1.42;     // excited-state spin-spin splitting
  double delta_ss = units::two_pi * 1.55; // excited-state spin-spin mixing
  double delta_pp = units::two_pi * 0.2;  // spin-spin coupling within E branch
  double l_z = units::two_pi * 5.3;       // axial spin-orbit splitting
  double g_es = 2.01;                     // excited-state g factor
  double e_g = units::two_pi * 4.7e5;     // optical gap; cancels in the rotating frame
  double zeeman_gs = units::two_pi * default_zeeman_ghz;  // g_gs * muB * Bz, ground manifold
  double zeeman_es = units::two_pi * default_zeeman_ghz;  // g_es * muB * Bz, excited manifold

  // Returns violation messages, empty when the parameter set is usable.
  std::vector<std::string> validate() const;
};

}  // namespace nvopt
