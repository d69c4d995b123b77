// Acceptance gate. Nine end-to-end checks over the assembled library: exact
// reference constants, the norm chain, the digital thinning bracket, the
// projector suite, resampler uniformity, the golfing telescoping identity,
// the paired recovery grid, the concentration-bound fixtures, and sweep
// determinism. Each check prints exactly one [PASS]/[FAIL] line; details of
// any failure surface through the test assertion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "config.hpp"
#include "experiments.hpp"
#include "tcomp/certificate.hpp"
#include "tcomp/io.hpp"
#include "tcomp/montecarlo.hpp"
#include "tcomp/norms.hpp"
#include "tcomp/rng.hpp"
#include "tcomp/sampling.hpp"
#include "tcomp/solver.hpp"
#include "tcomp/stats.hpp"
#include "tcomp/subspace.hpp"
#include "tcomp/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using tcomp::McReport;
using tcomp::OrthoDecomposition;
using tcomp::ProjectorKind;
using tcomp::SampleSet;
using tcomp::Tensor3;
using tcomp::TuckerSubspaces;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failure details for one acceptance check and prints its verdict.
struct Criterion {
  int number;
  const char* label;
  Clock::time_point start = Clock::now();
  std::vector<std::string> failures;

  Criterion(int n, const char* text) : number(n), label(text) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) failures.push_back(detail);
  }

  void budget(double limit_seconds) {
    const double elapsed = seconds_since(start);
    if (elapsed > limit_seconds)
      failures.push_back("runtime " + std::to_string(elapsed) + "s exceeds " +
                         std::to_string(limit_seconds) + "s");
  }

  void finish() {
    std::printf("[%s] criterion %d: %s\n", failures.empty() ? "PASS" : "FAIL", number, label);
    std::fflush(stdout);
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : " | ") + f;
    CHECK_MESSAGE(failures.empty(), joined);
  }
};

std::string fmt(double v) { return tcomp::format_value(v); }

Eigen::MatrixXd random_orthonormal(int rows, int cols, std::uint64_t seed) {
  tcomp::CounterRng rng(seed);
  Eigen::MatrixXd g =
      Eigen::MatrixXd::NullaryExpr(rows, cols, [&](Eigen::Index, Eigen::Index) { return rng.next_gaussian(); });
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(cols);
}

Tensor3 random_tensor(const std::array<int, 3>& dims, std::uint64_t seed) {
  tcomp::CounterRng rng(seed);
  Tensor3 x(dims[0], dims[1], dims[2]);
  for (std::int64_t i = 0; i < x.size(); ++i) x.values()[i] = rng.next_gaussian();
  return x;
}

struct Instance {
  OrthoDecomposition dec;
  Tensor3 truth;
  TuckerSubspaces sub;
  Tensor3 witness;
};

Instance make_instance(const std::array<int, 3>& dims, int r, std::uint64_t seed) {
  OrthoDecomposition dec;
  dec.lambda = Eigen::VectorXd::Ones(r);
  dec.u = random_orthonormal(dims[0], r, tcomp::mix(seed, 1));
  dec.v = random_orthonormal(dims[1], r, tcomp::mix(seed, 2));
  dec.w = random_orthonormal(dims[2], r, tcomp::mix(seed, 3));
  Instance inst{dec, dec.tensor(), {}, Tensor3(1, 1, 1)};
  inst.sub = tcomp::fiber_subspaces(inst.truth);
  inst.witness = tcomp::dual_witness(dec);
  return inst;
}

// Recovery-grid instances use the spread ensemble: entrywise observation can
// only recover what is incoherent, and gaussian factors at these dimensions
// routinely land too close to the axes to certify at any sampling fraction.
Instance make_spread_instance(const std::array<int, 3>& dims, int r, std::uint64_t seed) {
  const OrthoDecomposition dec = tcomp::sample_spread_decomposition(dims, r, {}, seed);
  Instance inst{dec, dec.tensor(), {}, Tensor3(1, 1, 1)};
  inst.sub = tcomp::fiber_subspaces(inst.truth);
  inst.witness = tcomp::dual_witness(dec);
  return inst;
}

TuckerSubspaces direct_subspaces(const std::array<int, 3>& dims, const std::array<int, 3>& ranks,
                                 std::uint64_t seed) {
  TuckerSubspaces sub;
  sub.dims = dims;
  sub.ranks = ranks;
  for (int j = 0; j < 3; ++j) {
    sub.bases[static_cast<std::size_t>(j)] = random_orthonormal(
        dims[static_cast<std::size_t>(j)], ranks[static_cast<std::size_t>(j)], tcomp::mix(seed, 10 + j));
    sub.projectors[static_cast<std::size_t>(j)] = sub.bases[static_cast<std::size_t>(j)] *
                                                  sub.bases[static_cast<std::size_t>(j)].transpose();
  }
  return sub;
}

Tensor3 three_corner_tensor() {
  Tensor3 u(2, 2, 2);
  u(1, 2, 2) = 1.0;
  u(2, 1, 2) = 1.0;
  u(2, 2, 1) = 1.0;
  return u;
}

Tensor3 all_ones_tensor() {
  Tensor3 y(2, 2, 2);
  for (std::int64_t i = 0; i < y.size(); ++i) y.values()[i] = 1.0;
  return y;
}

constexpr std::array<ProjectorKind, 8> kComponents{
    ProjectorKind::Q0,     ProjectorKind::Q1,     ProjectorKind::Q2,     ProjectorKind::Q3,
    ProjectorKind::Q0perp, ProjectorKind::Q1perp, ProjectorKind::Q2perp, ProjectorKind::Q3perp};

}  // namespace

TEST_CASE("criterion 1") {
  Criterion crit(1, "exact reference constants");
  const double two_over_sqrt3 = 2.0 / std::sqrt(3.0);
  const double two_sqrt2 = 2.0 * std::sqrt(2.0);

  const Tensor3 u = three_corner_tensor();
  const double spectral = tcomp::spectral_norm_hopm(u).value;
  crit.expect(std::abs(spectral - two_over_sqrt3) <= 1e-8,
              "spectral of the three-corner tensor: " + fmt(spectral));

  OrthoDecomposition ones_dec;
  ones_dec.lambda = Eigen::VectorXd::Constant(1, two_sqrt2);
  ones_dec.u = Eigen::MatrixXd::Constant(2, 1, 1.0 / std::sqrt(2.0));
  ones_dec.v = ones_dec.u;
  ones_dec.w = ones_dec.u;
  crit.expect(tcomp::hs_norm(ones_dec.tensor() - all_ones_tensor()) <= 1e-12,
              "all-ones decomposition does not reproduce the tensor");
  const double ones_nuclear = tcomp::nuclear_norm_ortho(ones_dec);
  crit.expect(std::abs(ones_nuclear - two_sqrt2) <= 1e-8, "all-ones nuclear: " + fmt(ones_nuclear));

  OrthoDecomposition corner_dec;
  corner_dec.lambda = Eigen::VectorXd::Ones(1);
  corner_dec.u = Eigen::MatrixXd::Zero(2, 1);
  corner_dec.u(0, 0) = 1.0;
  corner_dec.v = corner_dec.u;
  corner_dec.w = corner_dec.u;
  const double corner_nuclear = tcomp::nuclear_norm_ortho(corner_dec);
  crit.expect(std::abs(corner_nuclear - 1.0) <= 1e-8, "corner nuclear: " + fmt(corner_nuclear));

  Tensor3 wperp = u;
  wperp *= std::sqrt(3.0) / 2.0;  // unit spectral norm
  const auto full = tcomp::subgrad_inequality_check(corner_dec, ones_dec, wperp);
  crit.expect(!full.holds, "unit-norm direction should defeat the inequality");
  crit.expect(std::abs(full.lhs - two_sqrt2) <= 1e-8, "lhs at unit norm: " + fmt(full.lhs));
  crit.expect(std::abs(full.rhs - 3.5980762113533159403) <= 1e-8,
              "rhs at unit norm: " + fmt(full.rhs));

  Tensor3 half = wperp;
  half *= 0.5;
  const auto halved = tcomp::subgrad_inequality_check(corner_dec, ones_dec, half);
  crit.expect(halved.holds, "half-norm direction should satisfy the inequality");
  crit.expect(halved.cap_satisfied, "half-norm direction satisfies the 1/2 cap");
  crit.expect(std::abs(halved.rhs - 2.2990381056766579701) <= 1e-8,
              "rhs at half norm: " + fmt(halved.rhs));

  crit.budget(1.0);
  crit.finish();
}

TEST_CASE("criterion 2") {
  Criterion crit(2, "norm chain on random tensors");
  tcomp::CounterRng dims_rng(2024);
  int violations = 0;
  for (int t = 0; t < 200; ++t) {
    const std::array<int, 3> dims{static_cast<int>(dims_rng.below(8)) + 1,
                                  static_cast<int>(dims_rng.below(8)) + 1,
                                  static_cast<int>(dims_rng.below(8)) + 1};
    const Tensor3 x = random_tensor(dims, tcomp::mix(77, static_cast<std::uint64_t>(t)));
    if (tcomp::hs_norm(x) == 0.0) continue;
    const double maxn = tcomp::max_norm(x);
    const double spectral = tcomp::spectral_norm_hopm(x).value;
    const double hs = tcomp::hs_norm(x);
    if (!(maxn <= spectral + 1e-9 && spectral <= hs + 1e-9)) {
      ++violations;
      crit.expect(false, "tensor " + std::to_string(t) + ": max " + fmt(maxn) + ", spectral " +
                             fmt(spectral) + ", hs " + fmt(hs));
    }
  }
  crit.expect(violations == 0, std::to_string(violations) + " chain violations");
  crit.finish();
}

TEST_CASE("criterion 3") {
  Criterion crit(3, "digital thinning bracket");
  tcomp::CounterRng dims_rng(3031);
  for (int t = 0; t < 50; ++t) {
    const std::array<int, 3> dims{static_cast<int>(dims_rng.below(4)) + 1,
                                  static_cast<int>(dims_rng.below(4)) + 1,
                                  static_cast<int>(dims_rng.below(4)) + 1};
    const Tensor3 x = random_tensor(dims, tcomp::mix(88, static_cast<std::uint64_t>(t)));
    if (tcomp::hs_norm(x) == 0.0) continue;
    const double digital = tcomp::spectral_norm_digitalized(x);
    const double hopm = tcomp::spectral_norm_hopm(x).value;
    if (!(digital <= hopm + 1e-9 && hopm <= 8.0 * digital + 1e-9))
      crit.expect(false, "tensor " + std::to_string(t) + ": digital " + fmt(digital) + ", hopm " +
                             fmt(hopm));
  }

  for (int d = 1; d <= 6; ++d) {
    const int m = tcomp::digital_depth(d);
    const double c = tcomp::c_md(m, d, 2000);
    crit.expect(c >= 0.5, "thinning constant at d=" + std::to_string(d) + ": " + fmt(c));
    if (d >= 2) {
      // Sampling overshoots the true minimum, so 1/c undershoots 1/C and the
      // closed-form cap applies up to sampling slack.
      const double cap = std::sqrt(2.0 + 2.0 * (d - 1) / (std::pow(2.0, m) - 1.0));
      crit.expect(1.0 / c <= cap + 1e-3,
                  "inverse thinning constant at d=" + std::to_string(d) + ": " + fmt(1.0 / c) +
                      " vs cap " + fmt(cap));
    }
  }
  crit.budget(120.0);
  crit.finish();
}

TEST_CASE("criterion 4") {
  Criterion crit(4, "projector suite");
  int cells = 0;
  for (int d1 = 1; d1 <= 5; ++d1)
    for (int d2 = 1; d2 <= 5; ++d2)
      for (int d3 = 1; d3 <= 5; ++d3)
        for (int r1 = 1; r1 <= d1; ++r1)
          for (int r2 = 1; r2 <= d2; ++r2)
            for (int r3 = 1; r3 <= d3; ++r3) {
              const std::array<int, 3> dims{d1, d2, d3};
              const std::array<int, 3> ranks{r1, r2, r3};
              const std::uint64_t seed =
                  tcomp::mix(4000, static_cast<std::uint64_t>(++cells));
              const TuckerSubspaces sub = direct_subspaces(dims, ranks, seed);
              const std::string tag = "dims (" + std::to_string(d1) + "," + std::to_string(d2) +
                                      "," + std::to_string(d3) + ") ranks (" + std::to_string(r1) +
                                      "," + std::to_string(r2) + "," + std::to_string(r3) + ")";

              const Tensor3 x = random_tensor(dims, tcomp::mix(seed, 1));
              const double xsq = tcomp::hs_norm(x) * tcomp::hs_norm(x);
              std::array<Tensor3, 8> parts{Tensor3(d1, d2, d3), Tensor3(d1, d2, d3),
                                           Tensor3(d1, d2, d3), Tensor3(d1, d2, d3),
                                           Tensor3(d1, d2, d3), Tensor3(d1, d2, d3),
                                           Tensor3(d1, d2, d3), Tensor3(d1, d2, d3)};
              for (std::size_t j = 0; j < kComponents.size(); ++j)
                parts[j] = tcomp::apply_projector(sub, kComponents[j], x);
              bool orthogonal = true;
              for (std::size_t j = 0; j < parts.size() && orthogonal; ++j)
                for (std::size_t k = j + 1; k < parts.size(); ++k)
                  if (std::abs(tcomp::inner(parts[j], parts[k])) > 1e-8 * std::max(1.0, xsq)) {
                    orthogonal = false;
                    break;
                  }
              crit.expect(orthogonal, "component orthogonality at " + tag);

              for (const ProjectorKind kind : {ProjectorKind::Q, ProjectorKind::Qperp}) {
                const Tensor3 once = tcomp::apply_projector(sub, kind, x);
                const Tensor3 twice = tcomp::apply_projector(sub, kind, once);
                crit.expect(tcomp::hs_norm(twice - once) <= 1e-8 * std::max(1.0, tcomp::hs_norm(once)),
                            "idempotence at " + tag);
              }

              // A tensor inside the model range is fixed by Q and killed by Qperp.
              Tensor3 core = random_tensor(ranks, tcomp::mix(seed, 2));
              Tensor3 t = core;
              for (int j = 0; j < 3; ++j)
                t = tcomp::mode_multiply(sub.bases[static_cast<std::size_t>(j)], t, j + 1);
              const double tn = tcomp::hs_norm(t);
              if (tn > 0) {
                crit.expect(tcomp::hs_norm(tcomp::apply_projector(sub, ProjectorKind::Q, t) - t) <=
                                1e-8 * tn,
                            "range tensor not fixed at " + tag);
                crit.expect(tcomp::hs_norm(tcomp::apply_projector(sub, ProjectorKind::Qperp, t)) <=
                                1e-8 * tn,
                            "range tensor not annihilated at " + tag);
              }

              double trace = 0.0;
              for (int a = 1; a <= d1; ++a)
                for (int b = 1; b <= d2; ++b)
                  for (int c = 1; c <= d3; ++c) {
                    Tensor3 e(d1, d2, d3);
                    e(a, b, c) = 1.0;
                    trace += tcomp::apply_projector(sub, ProjectorKind::Q, e)(a, b, c);
                  }
              const double prank = static_cast<double>(tcomp::projector_rank(sub));
              crit.expect(std::abs(trace - prank) <= 1e-8 * std::max(1.0, prank),
                          "trace " + fmt(trace) + " vs rank " + fmt(prank) + " at " + tag);
            }
  crit.expect(cells == 3375, "expected 3375 cells, saw " + std::to_string(cells));

  // Pointwise coherence bound on random decomposable instances.
  tcomp::CounterRng dims_rng(4747);
  for (int t = 0; t < 50; ++t) {
    const std::array<int, 3> dims{static_cast<int>(dims_rng.below(7)) + 2,
                                  static_cast<int>(dims_rng.below(7)) + 2,
                                  static_cast<int>(dims_rng.below(7)) + 2};
    const int r = 1 + static_cast<int>(dims_rng.below(
                          static_cast<std::uint64_t>(std::min({dims[0], dims[1], dims[2], 3}))));
    const Instance inst = make_instance(dims, r, tcomp::mix(99, static_cast<std::uint64_t>(t)));
    double mu = 0.0;
    for (int j = 0; j < 3; ++j)
      mu = std::max(mu, tcomp::mu_subspace(inst.sub.bases[static_cast<std::size_t>(j)]));
    const double rb = tcomp::rbar(inst.sub.ranks, inst.sub.dims);
    const double d = dims[0] + dims[1] + dims[2];
    const double grid = static_cast<double>(dims[0]) * dims[1] * dims[2];
    const double cap = rb * rb * d * mu * mu / grid;
    for (int a = 1; a <= dims[0]; ++a)
      for (int b = 1; b <= dims[1]; ++b)
        for (int c = 1; c <= dims[2]; ++c) {
          Tensor3 e(dims[0], dims[1], dims[2]);
          e(a, b, c) = 1.0;
          const double diag = tcomp::apply_projector(inst.sub, ProjectorKind::Q, e)(a, b, c);
          if (diag > cap + 1e-8) {
            crit.expect(false, "coherence bound broken at instance " + std::to_string(t));
            a = dims[0], b = dims[1], c = dims[2];  // stop this instance
          }
        }
  }
  crit.finish();
}

TEST_CASE("criterion 5") {
  Criterion crit(5, "resampler uniformity");
  for (const std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    // First draws across many short sequences are uniform over a partial
    // observation set.
    const SampleSet omega = tcomp::sample_omega({2, 2, 2}, 6, tcomp::mix(seed, 1));
    std::vector<double> first_counts(6, 0.0);
    for (int t = 0; t < 10000; ++t) {
      const auto seq = tcomp::iid_from_omega(omega, 1, tcomp::mix(seed, 1000 + static_cast<std::uint64_t>(t)));
      first_counts[static_cast<std::size_t>(omega.rank(seq.triples[0]))] += 1.0;
    }
    const double p_first = tcomp::chi2_sf(tcomp::chi2_uniform_stat(first_counts), 5);
    crit.expect(p_first > 0.01, "first-draw p " + fmt(p_first) + " at seed " + std::to_string(seed));

    // One long sequence over the full grid spreads uniformly.
    const SampleSet full = tcomp::sample_omega({2, 2, 2}, 8, 1);
    const auto seq = tcomp::iid_from_omega(full, 10000, tcomp::mix(seed, 2));
    std::vector<double> counts(8, 0.0);
    for (const auto& t : seq.triples) counts[static_cast<std::size_t>(full.rank(t))] += 1.0;
    const double p_grid = tcomp::chi2_sf(tcomp::chi2_uniform_stat(counts), 7);
    crit.expect(p_grid > 0.01, "grid p " + fmt(p_grid) + " at seed " + std::to_string(seed));
  }
  crit.finish();
}

TEST_CASE("criterion 6") {
  Criterion crit(6, "golfing telescoping identity");
  tcomp::CounterRng dims_rng(6001);
  for (int t = 0; t < 20; ++t) {
    const std::array<int, 3> dims{static_cast<int>(dims_rng.below(3)) + 4,
                                  static_cast<int>(dims_rng.below(3)) + 4,
                                  static_cast<int>(dims_rng.below(3)) + 4};
    const int r = 1 + static_cast<int>(dims_rng.below(2));
    const Instance inst = make_instance(dims, r, tcomp::mix(600, static_cast<std::uint64_t>(t)));
    const std::int64_t grid = std::int64_t{dims[0]} * dims[1] * dims[2];
    const SampleSet omega =
        tcomp::sample_omega(dims, (grid * 2) / 3, tcomp::mix(601, static_cast<std::uint64_t>(t)));
    const auto seq =
        tcomp::iid_from_omega(omega, omega.n(), tcomp::mix(602, static_cast<std::uint64_t>(t)));
    const auto plan = tcomp::split_batches(seq, omega.n() / 4, 4);
    const auto state = tcomp::build_golfing(inst.sub, inst.witness, plan);
    const double wn = tcomp::hs_norm(inst.witness);
    for (std::size_t k = 0; k < state.w_steps.size(); ++k) {
      const Tensor3 qg = tcomp::apply_projector(inst.sub, ProjectorKind::Q, state.g_steps[k]);
      const double gap = tcomp::hs_norm(qg - (inst.witness - state.w_steps[k]));
      crit.expect(gap <= 1e-8 * wn,
                  "instance " + std::to_string(t) + " step " + std::to_string(k) + ": gap " + fmt(gap));
    }
  }
  crit.finish();
}

TEST_CASE("criterion 7") {
  Criterion crit(7, "end-to-end recovery grid");
  const std::array<std::array<int, 3>, 2> grids{{{8, 8, 8}, {10, 10, 10}}};
  const std::array<double, 3> fractions{0.10, 0.45, 0.80};
  const int trials = 20;
  int certified_total = 0, recovered_total = 0;

  for (const auto& dims : grids)
    for (int r : {1, 2}) {
      const std::int64_t grid = std::int64_t{dims[0]} * dims[1] * dims[2];
      double prev_rate = 0.0;
      for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        const auto n = static_cast<std::int64_t>(std::llround(fractions[fi] * static_cast<double>(grid)));
        int certified = 0;
        for (int t = 0; t < trials; ++t) {
          const std::uint64_t seed = tcomp::mix(
              7000 + 100 * static_cast<std::uint64_t>(dims[0]) + 10 * static_cast<std::uint64_t>(r),
              static_cast<std::uint64_t>(1000 * fi + static_cast<std::size_t>(t)));
          const Instance inst = make_spread_instance(dims, r, seed);
          const SampleSet omega = tcomp::sample_omega(dims, n, tcomp::mix(seed, 4));
          const auto report = tcomp::certify(inst.sub, omega, inst.witness, tcomp::mix(seed, 5));
          if (!report.certified) continue;
          ++certified;
          ++certified_total;
          tcomp::SolverParams params;
          params.target_ranks = {r, r, r};
          const auto result =
              tcomp::solve_tucker_als(tcomp::observe(inst.truth, omega), tcomp::mix(seed, 6), params);
          if (tcomp::relative_error(result.x_hat, inst.truth) <= 1e-6) ++recovered_total;
        }
        const double rate = static_cast<double>(certified) / trials;
        crit.expect(rate >= prev_rate - 1e-12,
                    "rate drop at dims " + std::to_string(dims[0]) + " r " + std::to_string(r) +
                        " n " + std::to_string(n) + ": " + fmt(rate) + " after " + fmt(prev_rate));
        prev_rate = rate;
        if (r == 1 && fi + 1 == fractions.size())
          crit.expect(rate >= 0.95, "top-end certification rate " + fmt(rate) + " at dims " +
                                        std::to_string(dims[0]));
      }
    }

  crit.expect(certified_total > 0, "no certified instances in the grid");
  if (certified_total > 0) {
    const double recovery = static_cast<double>(recovered_total) / certified_total;
    crit.expect(recovery >= 0.90, "recovery rate " + fmt(recovery) + " over " +
                                      std::to_string(certified_total) + " certified instances");
  }
  crit.budget(900.0);
  crit.finish();
}

TEST_CASE("criterion 8") {
  Criterion crit(8, "concentration-bound fixtures");
  std::vector<std::pair<std::string, McReport>> reports;

  const Instance inst = make_instance({6, 6, 6}, 1, 8001);
  reports.emplace_back("injectivity", tcomp::mc_injectivity_tail(inst.sub, 150, 0.5, 10000, 8101));

  for (const std::int64_t n1 : {50, 100, 200}) {
    const auto pair = tcomp::mc_batch_tails(inst.sub, inst.witness, n1, 0.5, 2000,
                                            tcomp::mix(8202, static_cast<std::uint64_t>(n1)));
    reports.emplace_back("batch_operator n1=" + std::to_string(n1), pair.first);
    reports.emplace_back("batch_max n1=" + std::to_string(n1), pair.second);
  }

  Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.5);
  reports.emplace_back("symmetrization", tcomp::mc_symmetrization(tcomp::outer(u, u, u), 64, 1.0, 10000, 8303));

  reports.emplace_back("occupancy", tcomp::mc_fiber_occupancy({6, 6, 6}, 60, 1.0, 1.0 / std::log(18.0),
                                                              100000, 8404));

  for (const auto& [name, rep] : reports) {
    crit.expect(rep.empirical_prob <= std::min(1.0, rep.bound) + rep.three_sigma,
                name + ": empirical " + fmt(rep.empirical_prob) + " vs bound " + fmt(rep.bound) +
                    " three-sigma " + fmt(rep.three_sigma));
    crit.expect(rep.bound_active == (rep.bound < 1.0), name + ": bound_active flag inconsistent");
  }
  crit.budget(600.0);
  crit.finish();
}

TEST_CASE("criterion 9") {
  Criterion crit(9, "deterministic sweeps");
  tcomp::app::ExperimentConfig cfg;
  cfg.dims = {6, 6, 6};
  cfg.r_grid = {1};
  cfg.n_grid = {100, 200};
  cfg.trials = 2;
  cfg.seed = 17;
  cfg.als_restarts = 2;

  const auto render = [&](int threads) {
    tcomp::app::ExperimentConfig run = cfg;
    run.threads = threads;
    std::ostringstream out;
    tcomp::app::run_phase_sweep(run, out);
    return out.str();
  };

  const std::string serial = render(1);
  const std::string serial_again = render(1);
  const std::string pooled = render(8);
  crit.expect(!serial.empty(), "sweep produced no output");
  crit.expect(serial == serial_again, "rerun bytes differ");
  crit.expect(serial == pooled, "thread counts 1 and 8 differ");
  crit.finish();
}
