#ifndef TCOMP_APP_CONFIG_HPP
#define TCOMP_APP_CONFIG_HPP

// Experiment configuration shared by the CLI drivers. Values resolve with
// the precedence: command-line flags over config-file entries over the
// defaults below. The effective configuration is echoed at the top of every
// CSV output as "# key=value" comment lines.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tcomp::app {

struct ExperimentConfig {
  std::array<int, 3> dims{6, 6, 6};
  std::vector<int> r_grid{1};
  std::vector<double> weights;          // empty: all ones, length r
  std::vector<std::int64_t> n_grid;     // observation counts, ascending
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;                      // empty: stdout

  // certificate construction
  double tau = 0.25;
  std::int64_t n1 = 0;                  // 0: floor(n / n2)
  std::int64_t n2 = 0;                  // 0: batch-count formula at tau
  double margin = 1.05;

  // solvers
  int als_restarts = 4;
  int als_iters = 300;
  int max_iters = 2000;

  // monte carlo
  std::string experiment;               // injectivity | batch | symmetrization | occupancy
  double mc_tau = 0.5;
  double t_threshold = 1.0;
  double beta = 1.0;
  double delta1 = 0.0;                  // 0: 1 / log(d1 + d2 + d3)
};

// Parses a flat key=value file into cfg (later entries win). Unknown keys,
// malformed lines and bad values raise std::runtime_error with
// "path:line: message".
void load_config_file(const std::string& path, ExperimentConfig& cfg);

// Applies one key=value assignment (used for both file entries and tests).
// `where` prefixes error messages.
void apply_config_entry(const std::string& key, const std::string& value, const std::string& where,
                        ExperimentConfig& cfg);

// Validates cross-field invariants shared by the grid-driven commands:
// ascending nonempty n grid, trials >= 1, weights length matching each r.
void validate_grid_config(const ExperimentConfig& cfg);

// Writes the effective configuration as "# key=value" lines in a fixed
// order, so equal configurations produce byte-identical output.
void echo_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace tcomp::app

#endif  // TCOMP_APP_CONFIG_HPP
