#include "config.hpp"

#include "tcomp/io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tcomp::app {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw std::runtime_error(where + ": " + message);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parse_int(const std::string& value, const std::string& where) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) fail(where, "bad integer '" + value + "'");
  return v;
}

double parse_real(const std::string& value, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) fail(where, "bad number '" + value + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(value);
  while (std::getline(in, part, ',')) parts.push_back(trim(part));
  return parts;
}

}  // namespace

void apply_config_entry(const std::string& key, const std::string& value, const std::string& where,
                        ExperimentConfig& cfg) {
  const auto as_int = [&](long long lo, long long hi) {
    const long long v = parse_int(value, where);
    if (v < lo || v > hi) fail(where, "value " + value + " out of range for " + key);
    return v;
  };
  if (key == "d1" || key == "d2" || key == "d3") {
    cfg.dims[static_cast<std::size_t>(key[1] - '1')] = static_cast<int>(as_int(1, 1 << 20));
  } else if (key == "r") {
    cfg.r_grid.assign(1, static_cast<int>(as_int(1, 1 << 20)));
  } else if (key == "r_grid") {
    cfg.r_grid.clear();
    for (const auto& part : split_commas(value))
      cfg.r_grid.push_back(static_cast<int>(parse_int(part, where)));
    if (cfg.r_grid.empty()) fail(where, "r_grid empty");
  } else if (key == "weights") {
    cfg.weights.clear();
    for (const auto& part : split_commas(value)) cfg.weights.push_back(parse_real(part, where));
  } else if (key == "n_grid") {
    cfg.n_grid.clear();
    for (const auto& part : split_commas(value)) cfg.n_grid.push_back(parse_int(part, where));
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(as_int(1, 1 << 30));
  } else if (key == "seed") {
    char* end = nullptr;
    cfg.seed = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size()) fail(where, "bad seed '" + value + "'");
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(as_int(1, 4096));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "tau") {
    cfg.tau = parse_real(value, where);
  } else if (key == "n1") {
    cfg.n1 = as_int(0, std::int64_t{1} << 60);
  } else if (key == "n2") {
    cfg.n2 = as_int(0, std::int64_t{1} << 60);
  } else if (key == "margin") {
    cfg.margin = parse_real(value, where);
  } else if (key == "als_restarts") {
    cfg.als_restarts = static_cast<int>(as_int(0, 1 << 20));
  } else if (key == "als_iters") {
    cfg.als_iters = static_cast<int>(as_int(1, 1 << 30));
  } else if (key == "max_iters") {
    cfg.max_iters = static_cast<int>(as_int(1, 1 << 30));
  } else if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "mc_tau") {
    cfg.mc_tau = parse_real(value, where);
  } else if (key == "t") {
    cfg.t_threshold = parse_real(value, where);
  } else if (key == "beta") {
    cfg.beta = parse_real(value, where);
  } else if (key == "delta1") {
    cfg.delta1 = parse_real(value, where);
  } else {
    fail(where, "unknown key '" + key + "'");
  }
}

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail(where, "expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    apply_config_entry(key, value, where, cfg);
  }
}

void validate_grid_config(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw std::runtime_error("n grid empty");
  if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()))
    throw std::runtime_error("n grid must be sorted ascending");
  for (const std::int64_t n : cfg.n_grid)
    if (n < 1) throw std::runtime_error("n grid entries must be positive");
  if (cfg.trials < 1) throw std::runtime_error("trials must be >= 1");
  for (const int r : cfg.r_grid) {
    if (r < 1) throw std::runtime_error("ranks must be >= 1");
    if (!cfg.weights.empty() && static_cast<int>(cfg.weights.size()) != r)
      throw std::runtime_error("weights length must equal r");
  }
}

void echo_config(std::ostream& out, const ExperimentConfig& cfg) {
  const auto list_int = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
  };
  std::string weights;
  for (std::size_t i = 0; i < cfg.weights.size(); ++i)
    weights += (i ? "," : "") + format_value(cfg.weights[i]);

  out << "# d1=" << cfg.dims[0] << '\n'
      << "# d2=" << cfg.dims[1] << '\n'
      << "# d3=" << cfg.dims[2] << '\n'
      << "# r_grid=" << list_int(cfg.r_grid) << '\n'
      << "# weights=" << weights << '\n'
      << "# n_grid=" << list_int(cfg.n_grid) << '\n'
      << "# trials=" << cfg.trials << '\n'
      << "# seed=" << cfg.seed << '\n'
      << "# tau=" << format_value(cfg.tau) << '\n'
      << "# n1=" << cfg.n1 << '\n'
      << "# n2=" << cfg.n2 << '\n'
      << "# margin=" << format_value(cfg.margin) << '\n'
      << "# als_restarts=" << cfg.als_restarts << '\n'
      << "# als_iters=" << cfg.als_iters << '\n'
      << "# max_iters=" << cfg.max_iters << '\n'
      << "# experiment=" << cfg.experiment << '\n'
      << "# mc_tau=" << format_value(cfg.mc_tau) << '\n'
      << "# t=" << format_value(cfg.t_threshold) << '\n'
      << "# beta=" << format_value(cfg.beta) << '\n'
      << "# delta1=" << format_value(cfg.delta1) << '\n';
}

}  // namespace tcomp::app
