#include "experiments.hpp"

#include "tcomp/certificate.hpp"
#include "tcomp/io.hpp"
#include "tcomp/montecarlo.hpp"
#include "tcomp/rng.hpp"
#include "tcomp/sampling.hpp"
#include "tcomp/solver.hpp"
#include "tcomp/subspace.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tcomp::app {

namespace {

// Per-purpose streams mixed into every cell seed, so the observation set,
// the instance, the resampling and the solvers never share raw randomness.
constexpr std::uint64_t kInstanceStream = 11;
constexpr std::uint64_t kOmegaStream = 12;
constexpr std::uint64_t kResampleStream = 13;
constexpr std::uint64_t kSolverStream = 14;
constexpr std::uint64_t kMcStream = 15;

std::string yesno(bool b) { return b ? "true" : "false"; }

// Runs make_row(0..count-1) on `threads` workers and returns the rows in
// index order; the first worker exception is rethrown after the join.
std::vector<std::string> collect_rows(std::size_t count, int threads,
                                      const std::function<std::string(std::size_t)>& make_row) {
  std::vector<std::string> rows(count);
  if (count == 0) return rows;
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) rows[i] = make_row(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          rows[i] = make_row(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

struct CellInstance {
  OrthoDecomposition decomposition;
  Tensor3 truth;
  TuckerSubspaces subspaces;
  Tensor3 witness;
};

CellInstance make_instance(const ExperimentConfig& cfg, int r, std::uint64_t cell_seed) {
  CellInstance inst{random_orthogonal_decomposition(cfg.dims, r, cfg.weights, mix(cell_seed, kInstanceStream)),
                    Tensor3(1, 1, 1), TuckerSubspaces{}, Tensor3(1, 1, 1)};
  inst.truth = inst.decomposition.tensor();
  inst.subspaces = fiber_subspaces(inst.truth);
  inst.witness = dual_witness(inst.decomposition);
  return inst;
}

CertificateOptions certificate_options(const ExperimentConfig& cfg) {
  CertificateOptions opts;
  opts.n1 = cfg.n1;
  opts.n2 = cfg.n2;
  opts.tau = cfg.tau;
  opts.margin = cfg.margin;
  return opts;
}

struct GridCell {
  int r = 0;
  std::int64_t n = 0;
  int trial = 0;
};

std::vector<GridCell> make_grid(const ExperimentConfig& cfg) {
  std::vector<GridCell> grid;
  grid.reserve(cfg.r_grid.size() * cfg.n_grid.size() * static_cast<std::size_t>(cfg.trials));
  for (const int r : cfg.r_grid)
    for (const std::int64_t n : cfg.n_grid)
      for (int trial = 0; trial < cfg.trials; ++trial) grid.push_back({r, n, trial});
  return grid;
}

}  // namespace

OrthoDecomposition random_orthogonal_decomposition(const std::array<int, 3>& dims, int r,
                                                   const std::vector<double>& weights,
                                                   std::uint64_t seed) {
  return sample_spread_decomposition(dims, r, weights, seed);
}

void run_certify(const ExperimentConfig& cfg, std::ostream& out) {
  validate_grid_config(cfg);
  const std::int64_t grid_size = std::int64_t{cfg.dims[0]} * cfg.dims[1] * cfg.dims[2];
  for (const std::int64_t n : cfg.n_grid)
    if (n > grid_size) throw std::runtime_error("n grid entry exceeds d1*d2*d3");

  const std::vector<GridCell> grid = make_grid(cfg);
  const auto rows = collect_rows(grid.size(), cfg.threads, [&](std::size_t i) {
    const GridCell& cell = grid[i];
    const std::uint64_t cell_seed = mix(cfg.seed, static_cast<std::uint64_t>(i));
    const CellInstance inst = make_instance(cfg, cell.r, cell_seed);
    const SampleSet omega = sample_omega(cfg.dims, cell.n, mix(cell_seed, kOmegaStream));
    const CertificateReport rep = certify(inst.subspaces, omega, inst.witness,
                                          mix(cell_seed, kResampleStream), certificate_options(cfg));
    std::ostringstream row;
    row << cfg.dims[0] << ',' << cfg.dims[1] << ',' << cfg.dims[2] << ',' << cell.r << ',' << cell.n
        << ',' << cell.trial << ',' << cell_seed << ',' << yesno(rep.certified) << ','
        << format_value(rep.injectivity_tau) << ',' << format_value(rep.hs_gap) << ','
        << format_value(rep.hs_threshold) << ',' << format_value(rep.spec_perp) << ','
        << format_value(rep.spec_perp_bracket) << ',' << rep.n1 << ',' << rep.n2;
    return row.str();
  });

  echo_config(out, cfg);
  out << "d1,d2,d3,r,n,trial,seed,certified,injectivity_tau,hs_gap,hs_threshold,spec_perp,"
         "spec_perp_bracket,n1,n2\n";
  for (const auto& row : rows) out << row << '\n';
}

void run_phase_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  validate_grid_config(cfg);
  const std::int64_t grid_size = std::int64_t{cfg.dims[0]} * cfg.dims[1] * cfg.dims[2];
  for (const std::int64_t n : cfg.n_grid)
    if (n > grid_size) throw std::runtime_error("n grid entry exceeds d1*d2*d3");

  const std::vector<GridCell> grid = make_grid(cfg);
  const auto rows = collect_rows(grid.size(), cfg.threads, [&](std::size_t i) {
    const GridCell& cell = grid[i];
    const std::uint64_t cell_seed = mix(cfg.seed, static_cast<std::uint64_t>(i));
    const CellInstance inst = make_instance(cfg, cell.r, cell_seed);
    const SampleSet omega = sample_omega(cfg.dims, cell.n, mix(cell_seed, kOmegaStream));
    const CertificateReport rep = certify(inst.subspaces, omega, inst.witness,
                                          mix(cell_seed, kResampleStream), certificate_options(cfg));

    const Observations obs = observe(inst.truth, omega);
    SolverParams params;
    params.target_ranks = {cell.r, cell.r, cell.r};
    params.als_restarts = cfg.als_restarts;
    params.als_iters = cfg.als_iters;
    params.max_iters = cfg.max_iters;
    const SolveResult als = solve_tucker_als(obs, mix(cell_seed, kSolverStream), params);
    const SolveResult admm = solve_matricized_nuclear(obs, params);

    std::ostringstream row;
    row << cfg.dims[0] << ',' << cfg.dims[1] << ',' << cfg.dims[2] << ',' << cell.r << ',' << cell.n
        << ',' << cell.trial << ',' << cell_seed << ',' << yesno(rep.certified) << ','
        << format_value(rep.injectivity_tau) << ',' << format_value(rep.hs_gap) << ','
        << format_value(rep.hs_threshold) << ',' << format_value(rep.spec_perp) << ','
        << format_value(relative_error(als.x_hat, inst.truth)) << ','
        << format_value(relative_error(admm.x_hat, inst.truth));
    return row.str();
  });

  echo_config(out, cfg);
  out << "d1,d2,d3,r,n,trial,seed,certified,injectivity_tau,hs_gap,hs_threshold,spec_perp,"
         "als_rel_err,matricized_rel_err\n";
  for (const auto& row : rows) out << row << '\n';
}

void run_montecarlo(const ExperimentConfig& cfg, std::ostream& out) {
  static const char* kValid = "injectivity, batch, symmetrization, occupancy";
  if (cfg.experiment != "injectivity" && cfg.experiment != "batch" && cfg.experiment != "symmetrization" &&
      cfg.experiment != "occupancy")
    throw std::runtime_error("unknown experiment '" + cfg.experiment + "' (valid: " + kValid + ")");
  validate_grid_config(cfg);
  const int r = cfg.r_grid.front();
  const double d_sum = static_cast<double>(cfg.dims[0] + cfg.dims[1] + cfg.dims[2]);
  const double delta1 = cfg.delta1 > 0 ? cfg.delta1 : 1.0 / std::log(d_sum);

  const auto report_row = [&](const std::string& name, std::int64_t n, double threshold,
                              std::uint64_t cell_seed, const McReport& rep) {
    std::ostringstream row;
    row << name << ',' << cfg.dims[0] << ',' << cfg.dims[1] << ',' << cfg.dims[2] << ',' << r << ','
        << n << ',' << format_value(threshold) << ',' << rep.trials << ',' << cell_seed << ','
        << rep.event_count << ',' << format_value(rep.empirical_prob) << ',' << format_value(rep.bound)
        << ',' << yesno(rep.bound_active) << ',' << format_value(rep.three_sigma);
    return row.str();
  };

  const auto rows = collect_rows(cfg.n_grid.size(), cfg.threads, [&](std::size_t i) {
    const std::int64_t n = cfg.n_grid[i];
    const std::uint64_t cell_seed = mix(cfg.seed, static_cast<std::uint64_t>(i));
    const std::uint64_t mc_seed = mix(cell_seed, kMcStream);
    if (cfg.experiment == "occupancy") {
      const McReport rep = mc_fiber_occupancy(cfg.dims, n, cfg.beta, delta1, cfg.trials, mc_seed);
      return report_row("occupancy", n, fiber_occupancy_threshold(cfg.dims, n, cfg.beta, delta1),
                        cell_seed, rep);
    }
    const CellInstance inst = make_instance(cfg, r, cell_seed);
    if (cfg.experiment == "injectivity") {
      const McReport rep = mc_injectivity_tail(inst.subspaces, n, cfg.mc_tau, cfg.trials, mc_seed);
      return report_row("injectivity", n, cfg.mc_tau, cell_seed, rep);
    }
    if (cfg.experiment == "batch") {
      const auto [op_rep, max_rep] = mc_batch_tails(inst.subspaces, inst.witness, n, cfg.mc_tau,
                                                    cfg.trials, mc_seed);
      return report_row("batch_operator", n, cfg.mc_tau, cell_seed, op_rep) + "\n" +
             report_row("batch_max", n, cfg.mc_tau, cell_seed, max_rep);
    }
    Tensor3 x = inst.truth;
    x *= 1.0 / hs_norm(x);
    const McReport rep = mc_symmetrization(x, n, cfg.t_threshold, cfg.trials, mc_seed);
    return report_row("symmetrization", n, cfg.t_threshold, cell_seed, rep);
  });

  echo_config(out, cfg);
  out << "experiment,d1,d2,d3,r,n,threshold,trials,seed,event_count,empirical_prob,bound,"
         "bound_active,three_sigma\n";
  for (const auto& row : rows) out << row << '\n';
}

void run_norms(const std::string& tensor_path, const std::string& decomposition_path, std::ostream& out) {
  const Tensor3 x = load_tensor(tensor_path);
  const Norms<double> base = norms(x);
  out << "metric,value\n";
  out << "max," << format_value(base.max) << '\n';
  out << "hs," << format_value(base.hs) << '\n';

  const bool feasible = digital_enumeration_feasible(x.dims());
  if (base.hs == 0.0) {
    out << "spectral_hopm,0\n";
    if (feasible) {
      out << "digitalized,0\n";
      out << "digitalized_upper,0\n";
    }
  } else {
    out << "spectral_hopm," << format_value(spectral_norm_hopm(x).value) << '\n';
    if (feasible) {
      const double digital = spectral_norm_digitalized(x);
      out << "digitalized," << format_value(digital) << '\n';
      out << "digitalized_upper," << format_value(8.0 * digital) << '\n';
    }
  }

  if (!decomposition_path.empty()) {
    const OrthoDecomposition dec = load_decomposition(decomposition_path);
    const Tensor3 rebuilt = dec.tensor();
    rebuilt.require_same_dims(x);
    if (hs_norm(rebuilt - x) > 1e-8 * std::max(1.0, hs_norm(x)))
      throw std::runtime_error(decomposition_path + ": decomposition does not reproduce the tensor");
    out << "nuclear," << format_value(nuclear_norm_ortho(dec)) << '\n';
  }
}

}  // namespace tcomp::app
