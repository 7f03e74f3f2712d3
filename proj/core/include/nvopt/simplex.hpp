#pragma once

#include <array>
#include <functional>
#include <vector>

namespace nvopt {

struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_evals = 400;
  double stall_tol = 1e-6;  // stop when the simplex value spread drops below
  std::vector<std::array<double, 2>> bounds;  // hard box, one pair per axis
  double initial_step_fraction = 0.05;        // of each box width
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  std::vector<double> best_history;  // best-so-far after each evaluation
};

// Maximizes the objective over the box in cfg.bounds with the standard
// Nelder-Mead moves; every trial point is clipped back into the box.
// Non-finite objective values are treated as -inf. Fully deterministic.
SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& start, const SimplexConfig& cfg);

}  // namespace nvopt
