#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "nvopt/constants.hpp"

namespace nvopt {

// Basis ordering: ground triplet, excited sextet, metastable shelf level.
enum class Level : int {
  minus_one = 0,
  zero = 1,
  plus_one = 2,
  a2 = 3,
  a1 = 4,
  ex = 5,
  ey = 6,
  e1 = 7,
  e2 = 8,
  shelf = 9,
};

inline constexpr int n_levels = 10;

const char* level_label(Level k);        // "-1", "0", "+1", "A2", ..., "10"
const char* level_column_name(Level k);  // CSV column: "P_minus1", "P_0", ...
std::optional<Level> level_from_label(std::string_view label);

struct JumpChannel {
  Level from;
  Level to;
  double rate;  // 1/ns
};

// Spontaneous decay rate between two levels (1/ns); 0 for neglected pairs.
double decay_rate(Level from, Level to);

struct NvModel {
  int dims = 10;
  std::vector<Level> levels;   // basis order of the rows/columns below
  Eigen::MatrixXcd h_static;   // rotating-frame Hamiltonian, rad/ns
  Eigen::MatrixXcd v_pattern;  // drive coupling at unit field amplitude
  std::vector<JumpChannel> jumps;
  double delta1 = 0.0;  // carrier resonant with |-1> <-> A2, rad/ns
  double delta2 = 0.0;  // carrier resonant with |+1> <-> A2, rad/ns

  int index_of(Level k) const;  // -1 when the level is not in this basis
};

Eigen::Matrix3cd build_ground_hamiltonian(const PhysicalConstants& c);
Eigen::MatrixXcd build_excited_hamiltonian(const PhysicalConstants& c);  // 6x6
Eigen::MatrixXcd build_dipole_pattern();  // 10x10, unit field amplitude

// dims selects the full 10-level system, the 4-level subsystem
// (|-1>,|0>,|+1>,A2), or the bare Lambda system (|-1>,A2,|+1>).
// The Lambda system carries no decay channels regardless of `dissipation`.
NvModel build_interaction_model(const PhysicalConstants& c, int dims,
                                bool dissipation = true);

}  // namespace nvopt
