#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nvopt/config.hpp"
#include "nvopt/io.hpp"

namespace nvopt {

// Executes one experiment and writes <output_dir>/<label>/ containing
// spec.json (effective config echo), results.csv, MANIFEST and, for
// optimizer kinds, runs/*.json. Returns the experiment directory.
std::string run_experiment(const Config& cfg, const ExperimentConfig& exp,
                           std::ostream& log);

// Runs every configured experiment in order.
std::vector<std::string> run_config(const Config& cfg, std::ostream& log);

// Built-in consistency checks (model structure, trace preservation,
// propagator against closed forms, gradient against finite differences,
// serialization round trips). Prints one line per check and returns the
// number of failures.
int run_validate(std::ostream& log);

}  // namespace nvopt
