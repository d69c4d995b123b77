#ifndef TCOMP_MONTECARLO_HPP
#define TCOMP_MONTECARLO_HPP

// Monte-Carlo validation of the concentration bounds. Each experiment
// replays the random object a bound speaks about (observation set, batch
// operator, symmetrized sum, fiber occupancy), counts threshold
// exceedances, and reports the empirical frequency next to the bound
// evaluated at the same parameters. A bound >= 1 is vacuous at those
// parameters; bound_active flags that.

#include "tcomp/certificate.hpp"
#include "tcomp/norms.hpp"
#include "tcomp/rng.hpp"
#include "tcomp/sampling.hpp"
#include "tcomp/subspace.hpp"
#include "tcomp/tensor.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tcomp {

struct McReport {
  int trials = 0;
  int event_count = 0;
  double empirical_prob = 0.0;
  double bound = 0.0;         // tail bound evaluated at the tested threshold
  bool bound_active = false;  // bound < 1, i.e. the bound carries information
  double three_sigma = 0.0;   // 3x binomial standard error of empirical_prob
};

namespace detail {

inline McReport finalize_report(int trials, int events, double bound) {
  McReport rep;
  rep.trials = trials;
  rep.event_count = events;
  rep.empirical_prob = static_cast<double>(events) / trials;
  rep.bound = bound;
  rep.bound_active = bound < 1.0;
  rep.three_sigma = 3.0 * std::sqrt(rep.empirical_prob * (1.0 - rep.empirical_prob) / trials);
  return rep;
}

inline void require_trials(int trials) {
  if (trials < 100) throw std::invalid_argument("monte carlo experiments need at least 100 trials");
}

inline IndexTriple unrank_triple(const std::array<int, 3>& dims, std::int64_t key) {
  const int c = static_cast<int>(key % dims[2]);
  key /= dims[2];
  const int b = static_cast<int>(key % dims[1]);
  const int a = static_cast<int>(key / dims[1]);
  return {a + 1, b + 1, c + 1};
}

inline std::vector<IndexTriple> draw_uniform_batch(const std::array<int, 3>& dims, std::int64_t n1,
                                                   CounterRng& rng) {
  const std::uint64_t grid = static_cast<std::uint64_t>(std::int64_t{dims[0]} * dims[1] * dims[2]);
  std::vector<IndexTriple> batch;
  batch.reserve(static_cast<std::size_t>(n1));
  for (std::int64_t i = 0; i < n1; ++i)
    batch.push_back(unrank_triple(dims, static_cast<std::int64_t>(rng.below(grid))));
  return batch;
}

inline double mu_max(const TuckerSubspaces& sub) {
  return std::max({mu_subspace(sub.bases[0]), mu_subspace(sub.bases[1]), mu_subspace(sub.bases[2])});
}

// exp(-(tau^2/2) / (1 + 2 tau / 3) * n / (mu^2 rbar^2 d)), the shared
// exponential factor of the operator tail bounds.
inline double operator_tail_factor(double tau, double n, double mu, double rb, double d) {
  const double exponent = -(tau * tau / 2.0) / (1.0 + 2.0 * tau / 3.0) * (n / (mu * mu * rb * rb * d));
  return std::exp(exponent);
}

// ||Q_T R Q_T|| for one batch operator, by power iteration on range(Q_T).
inline double batch_operator_norm(const TuckerSubspaces& sub, const std::vector<IndexTriple>& batch,
                                  std::uint64_t seed, int probes = 4, int iters = 100, double tol = 1e-8) {
  const std::array<int, 3>& dims = sub.dims;
  double best = 0.0;
  for (int p = 0; p < probes; ++p) {
    CounterRng rng(mix(seed, static_cast<std::uint64_t>(p)));
    Tensor3 v(dims[0], dims[1], dims[2]);
    for (std::int64_t i = 0; i < v.size(); ++i) v.values()[i] = rng.next_gaussian();
    v = apply_projector(sub, ProjectorKind::Q, v);
    const double nv = hs_norm(v);
    if (nv == 0.0) continue;
    v *= 1.0 / nv;
    double rq = 0.0;
    for (int it = 0; it < iters; ++it) {
      const Tensor3 av = apply_projector(sub, ProjectorKind::Q, apply_batch_operator(batch, v));
      const double prev = rq;
      rq = inner(v, av);
      const double nav = hs_norm(av);
      if (nav == 0.0) {
        rq = 0.0;
        break;
      }
      v = av;
      v *= 1.0 / nav;
      if (it > 0 && std::abs(rq - prev) < tol) break;
    }
    best = std::max(best, std::abs(rq));
  }
  return best;
}

}  // namespace detail

// Tail of ||Q_T ((d1 d2 d3 / n) P_Omega - I) Q_T|| over observation sets of
// size n drawn without replacement, against the bound
//   2 rbar^2 d exp(-(tau^2/2) / (1 + 2 tau/3) * n / (mu^2 rbar^2 d)).
inline McReport mc_injectivity_tail(const TuckerSubspaces& sub, std::int64_t n, double tau, int trials,
                                    std::uint64_t seed, int probes = 4, int iters = 100) {
  detail::require_trials(trials);
  const double mu = detail::mu_max(sub);
  const double rb = rbar(sub.ranks, sub.dims);
  const double d = static_cast<double>(sub.dims[0] + sub.dims[1] + sub.dims[2]);
  int events = 0;
  for (int t = 0; t < trials; ++t) {
    const SampleSet omega = sample_omega(sub.dims, n, mix(seed, static_cast<std::uint64_t>(t)));
    if (estimate_injectivity(sub, omega, probes, iters) >= tau) ++events;
  }
  const double bound =
      2.0 * rb * rb * d * detail::operator_tail_factor(tau, static_cast<double>(n), mu, rb, d);
  return detail::finalize_report(trials, events, bound);
}

// Tails of one i.i.d.-sampled batch operator R on n1 uniform draws:
//   first:  P{ ||Q_T R Q_T|| >= tau }           vs 2 rbar^2 d exp(...)
//   second: P{ ||Q_T R Q_T X||_max >= tau }     vs 2 d1 d2 d3 exp(...)
// with X = witness / ||witness||_max, a fixed max-norm-one test point.
inline std::pair<McReport, McReport> mc_batch_tails(const TuckerSubspaces& sub, const Tensor3& witness,
                                                    std::int64_t n1, double tau, int trials,
                                                    std::uint64_t seed) {
  detail::require_trials(trials);
  if (witness.dims() != sub.dims) throw std::invalid_argument("mc_batch_tails: dims do not match");
  const double wmax = max_norm(witness);
  if (wmax == 0.0) throw std::invalid_argument("mc_batch_tails: zero witness");
  Tensor3 x0 = witness;
  x0 *= 1.0 / wmax;

  const double mu = detail::mu_max(sub);
  const double rb = rbar(sub.ranks, sub.dims);
  const double d = static_cast<double>(sub.dims[0] + sub.dims[1] + sub.dims[2]);
  const double grid = static_cast<double>(std::int64_t{sub.dims[0]} * sub.dims[1] * sub.dims[2]);

  int op_events = 0, max_events = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(mix(seed, static_cast<std::uint64_t>(t)));
    const std::vector<IndexTriple> batch = detail::draw_uniform_batch(sub.dims, n1, rng);
    if (detail::batch_operator_norm(sub, batch, mix(seed, mix(7, static_cast<std::uint64_t>(t)))) >= tau)
      ++op_events;
    const Tensor3 rx = apply_projector(
        sub, ProjectorKind::Q, apply_batch_operator(batch, apply_projector(sub, ProjectorKind::Q, x0)));
    if (max_norm(rx) >= tau) ++max_events;
  }
  const double factor = detail::operator_tail_factor(tau, static_cast<double>(n1), mu, rb, d);
  return {detail::finalize_report(trials, op_events, 2.0 * rb * rb * d * factor),
          detail::finalize_report(trials, max_events, 2.0 * grid * factor)};
}

// Symmetrization step: the tail of the centered sampling operator at t is
// controlled by the tail of its Rademacher-symmetrized counterpart at t/2
// plus a Bernstein remainder,
//   P{ ||(D/n) sum_i P_i X - X|| >= t }
//     <= 4 max P{ ||(D/n) sum_i eps_i P_i X|| >= t/2 }
//        + 4 exp(-(n t^2 / 2) / (eta^2 + 2 eta t sqrt(D) / 3)),
// with eta = sqrt(D) ||X||_max. Both sides are estimated on fresh draws;
// the report's bound is the estimated right-hand side and three_sigma
// combines both binomial errors.
inline McReport mc_symmetrization(const Tensor3& x, std::int64_t n, double t, int trials,
                                  std::uint64_t seed, int hopm_restarts = 8) {
  detail::require_trials(trials);
  const std::array<int, 3> dims = x.dims();
  const double grid = static_cast<double>(x.size());
  const double scale = grid / static_cast<double>(n);

  int lhs_events = 0, rad_events = 0;
  std::unordered_map<std::int64_t, double> coeff;
  for (int tr = 0; tr < trials; ++tr) {
    CounterRng rng(mix(seed, static_cast<std::uint64_t>(tr)));

    coeff.clear();
    for (std::int64_t i = 0; i < n; ++i)
      coeff[static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(x.size())))] += 1.0;
    Tensor3 z = x;
    z *= -1.0;
    for (const auto& [key, c] : coeff) z.values()[key] += scale * c * x.values()[key];
    if (hs_norm(z) > 0.0 && spectral_norm_hopm(z, hopm_restarts).value >= t) ++lhs_events;

    coeff.clear();
    for (std::int64_t i = 0; i < n; ++i) {
      const auto key = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(x.size())));
      coeff[key] += (rng.next_u64() & 1u) ? 1.0 : -1.0;
    }
    Tensor3 zr(dims[0], dims[1], dims[2]);
    for (const auto& [key, c] : coeff) zr.values()[key] = scale * c * x.values()[key];
    if (hs_norm(zr) > 0.0 && spectral_norm_hopm(zr, hopm_restarts).value >= t / 2.0) ++rad_events;
  }

  const double eta = std::sqrt(grid) * max_norm(x);
  const double remainder =
      4.0 * std::exp(-(static_cast<double>(n) * t * t / 2.0) /
                     (eta * eta + 2.0 * eta * t * std::sqrt(grid) / 3.0));
  const double p_rad = static_cast<double>(rad_events) / trials;

  McReport rep = detail::finalize_report(trials, lhs_events, 4.0 * p_rad + remainder);
  const double var_lhs = rep.empirical_prob * (1.0 - rep.empirical_prob) / trials;
  const double var_rad = p_rad * (1.0 - p_rad) / trials;
  rep.three_sigma = 3.0 * std::sqrt(var_lhs + 16.0 * var_rad);
  return rep;
}

// Occupancy threshold nu1 = max(d^{delta1} e n p, (3 + beta) / delta1)
// with p = max_j d_j / (d1 d2 d3).
inline double fiber_occupancy_threshold(const std::array<int, 3>& dims, std::int64_t n, double beta,
                                        double delta1) {
  const double d = static_cast<double>(dims[0] + dims[1] + dims[2]);
  const double logd = std::log(d);
  if (!(delta1 >= 1.0 / logd - 1e-12 && delta1 <= 1.0 + 1e-12))
    throw std::invalid_argument("fiber occupancy: delta1 must lie in [1/log d, 1]");
  if (!(beta > 0)) throw std::invalid_argument("fiber occupancy: beta must be positive");
  const double grid = static_cast<double>(std::int64_t{dims[0]} * dims[1] * dims[2]);
  const double p = static_cast<double>(fiber_capacity(dims)) / grid;
  return std::max(std::pow(d, delta1) * std::exp(1.0) * static_cast<double>(n) * p, (3.0 + beta) / delta1);
}

// Tail of the largest fiber occupancy nu_Omega over observation sets of
// size n, against the threshold nu1 above, whose exceedance probability is
// bounded by d^{-beta-1} / 3.
inline McReport mc_fiber_occupancy(const std::array<int, 3>& dims, std::int64_t n, double beta,
                                   double delta1, int trials, std::uint64_t seed) {
  detail::require_trials(trials);
  const double d = static_cast<double>(dims[0] + dims[1] + dims[2]);
  const double nu1 = fiber_occupancy_threshold(dims, n, beta, delta1);

  int events = 0;
  for (int t = 0; t < trials; ++t) {
    const SampleSet omega = sample_omega(dims, n, mix(seed, static_cast<std::uint64_t>(t)));
    if (static_cast<double>(fiber_occupancy(omega)) >= nu1) ++events;
  }
  return detail::finalize_report(trials, events, std::pow(d, -beta - 1.0) / 3.0);
}

}  // namespace tcomp

#endif  // TCOMP_MONTECARLO_HPP
