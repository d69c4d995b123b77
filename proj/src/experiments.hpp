#ifndef TCOMP_APP_EXPERIMENTS_HPP
#define TCOMP_APP_EXPERIMENTS_HPP

// CSV-emitting drivers behind the CLI subcommands. Every driver is a pure
// function of (config, seed): grid cells carry seeds derived from their
// grid position, cells run on a worker pool, and rows are buffered and
// written in grid order, so output bytes do not depend on the thread count.

#include "config.hpp"

#include "tcomp/norms.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tcomp::app {

// Ground-truth instance: orthonormal factor triples from seeded Gaussian
// matrices (QR), with the given positive weights (all ones when empty).
OrthoDecomposition random_orthogonal_decomposition(const std::array<int, 3>& dims, int r,
                                                   const std::vector<double>& weights,
                                                   std::uint64_t seed);

void run_certify(const ExperimentConfig& cfg, std::ostream& out);
void run_phase_sweep(const ExperimentConfig& cfg, std::ostream& out);
void run_montecarlo(const ExperimentConfig& cfg, std::ostream& out);

// Norm table for a tensor file; nuclear norm only when a decomposition
// sidecar path is given (it must reproduce the tensor).
void run_norms(const std::string& tensor_path, const std::string& decomposition_path, std::ostream& out);

}  // namespace tcomp::app

#endif  // TCOMP_APP_EXPERIMENTS_HPP
