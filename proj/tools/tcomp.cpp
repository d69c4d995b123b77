// Command-line harness: certificate grids, recovery phase sweeps, tail-bound
// Monte Carlo experiments and norm tables, all emitting CSV. Every command is
// a pure function of (config, seed); output is buffered and written whole, so
// reruns with equal inputs are byte-identical.

#include "config.hpp"
#include "experiments.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << bytes;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor completion: certificates, phase sweeps, tail experiments, norms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string tensor_path;
  std::string decomposition_path;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--seed", seed, "master seed (overrides the config file)");
    sub->add_option("--out", out_path, "output path (default: stdout)");
    sub->add_option("--threads", threads, "worker threads for grid cells")->check(CLI::PositiveNumber);
  };

  CLI::App* certify = app.add_subcommand("certify", "per-cell dual-certificate reports");
  CLI::App* sweep = app.add_subcommand("phase-sweep", "certificate plus solver recovery grid");
  CLI::App* montecarlo = app.add_subcommand("montecarlo", "concentration tail-bound experiments");
  CLI::App* norms = app.add_subcommand("norms", "norm table for a tensor file");
  add_common(certify);
  add_common(sweep);
  add_common(montecarlo);
  add_common(norms);
  norms->add_option("tensor", tensor_path, "tensor text file")->required();
  norms->add_option("--decomposition", decomposition_path,
                    "orthogonal decomposition sidecar (enables the nuclear norm row)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    tcomp::app::ExperimentConfig cfg;
    if (sub->count("--config") > 0) tcomp::app::load_config_file(config_path, cfg);
    if (sub->count("--seed") > 0) cfg.seed = seed;
    if (sub->count("--threads") > 0) cfg.threads = threads;
    if (sub->count("--out") > 0) cfg.out = out_path;

    std::ostringstream buffer;
    if (sub == norms) {
      tcomp::app::run_norms(tensor_path, decomposition_path, buffer);
    } else if (sub == certify) {
      tcomp::app::run_certify(cfg, buffer);
    } else if (sub == sweep) {
      tcomp::app::run_phase_sweep(cfg, buffer);
    } else {
      tcomp::app::run_montecarlo(cfg, buffer);
    }
    write_output(cfg.out, buffer.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
