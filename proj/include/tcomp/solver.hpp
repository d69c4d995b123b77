#ifndef TCOMP_SOLVER_HPP
#define TCOMP_SOLVER_HPP

// Completion solvers.
//
// solve_matricized_nuclear: ADMM on
//     min sum_j ||M_j||_*  s.t.  M_j = unfold(X, j),  X restricted to
// Omega equals the data. Each mode carries its own splitting variable and
// unscaled dual; the X update averages the refolded M_j + Y_j / rho and
// then pins the observed entries, which is the exact constrained minimizer
// because the quadratic separates per entry.
//
// solve_tucker_als: alternating least squares over a Tucker model
// [G; A, B, C] fit to the observed entries only, with a small ridge to keep
// the per-row normal equations well posed and randomized restarts to escape
// bad basins.

#include "tcomp/rng.hpp"
#include "tcomp/sampling.hpp"
#include "tcomp/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tcomp {

// Observed values aligned with omega.linear().
struct Observations {
  SampleSet omega;
  Eigen::VectorXd values;

  Observations(SampleSet om, Eigen::VectorXd vals) : omega(std::move(om)), values(std::move(vals)) {
    if (values.size() != omega.n()) throw std::invalid_argument("Observations: value count must equal |Omega|");
    if (!values.allFinite()) throw std::invalid_argument("Observations: values must be finite");
  }
};

inline Observations observe(const Tensor3& truth, const SampleSet& omega) {
  if (truth.dims() != omega.dims()) throw std::invalid_argument("observe: dims do not match");
  Eigen::VectorXd vals(omega.n());
  for (std::int64_t i = 0; i < omega.n(); ++i) vals[i] = truth.values()[omega.linear()[static_cast<std::size_t>(i)]];
  return Observations(omega, std::move(vals));
}

inline Tensor3 zero_filled(const Observations& obs) {
  const auto& dims = obs.omega.dims();
  Tensor3 x(dims[0], dims[1], dims[2]);
  for (std::int64_t i = 0; i < obs.omega.n(); ++i)
    x.values()[obs.omega.linear()[static_cast<std::size_t>(i)]] = obs.values[i];
  return x;
}

struct SolverParams {
  int max_iters = 2000;
  double abs_tol = 1e-8;
  double rel_tol = 1e-10;
  double penalty = 1.0;  // initial ADMM parameter rho
  std::array<int, 3> target_ranks{1, 1, 1};
  int als_restarts = 4;  // randomized restarts on top of the spectral start
  int als_iters = 300;
};

struct SolveResult {
  Tensor3 x_hat;
  int iterations = 0;
  bool converged = false;
  double constraint_residual = 0.0;     // max over observed entries of |x_hat - data|
  std::vector<double> objective_trace;  // per-iteration objective or fit residual
};

namespace detail {

inline double max_observed_misfit(const Tensor3& x, const Observations& obs) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < obs.omega.n(); ++i)
    worst = std::max(worst,
                     std::abs(x.values()[obs.omega.linear()[static_cast<std::size_t>(i)]] - obs.values[i]));
  return worst;
}

}  // namespace detail

namespace detail {

inline constexpr std::uint64_t kAlsStream = 0x414c530000000001ULL;

// Singular-value soft threshold.
inline Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double threshold) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) sigma[i] = std::max(sigma[i] - threshold, 0.0);
  return svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

inline Eigen::MatrixXd random_orthonormal(CounterRng& rng, int rows, int cols) {
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace detail

inline SolveResult solve_matricized_nuclear(const Observations& obs, const SolverParams& params = {}) {
  const auto& dims = obs.omega.dims();
  const std::int64_t grid = std::int64_t{dims[0]} * dims[1] * dims[2];
  double rho = params.penalty;
  if (!(rho > 0)) throw std::invalid_argument("solve_matricized_nuclear: penalty must be positive");

  SolveResult out{zero_filled(obs)};
  Tensor3& x = out.x_hat;
  std::array<Eigen::MatrixXd, 3> m, y;
  for (int j = 0; j < 3; ++j) {
    m[j] = unfold(x, j + 1);
    y[j] = Eigen::MatrixXd::Zero(m[j].rows(), m[j].cols());
  }

  for (int it = 0; it < params.max_iters; ++it) {
    for (int j = 0; j < 3; ++j) m[j] = detail::svt(unfold(x, j + 1) - y[j] / rho, 1.0 / rho);

    const Tensor3 x_prev = x;
    Tensor3 sum(dims[0], dims[1], dims[2]);
    for (int j = 0; j < 3; ++j) sum += refold<double>(m[j] + y[j] / rho, j + 1, dims);
    x = sum;
    x *= 1.0 / 3.0;
    for (std::int64_t i = 0; i < obs.omega.n(); ++i)
      x.values()[obs.omega.linear()[static_cast<std::size_t>(i)]] = obs.values[i];

    // The trace follows the pinned iterate, which is feasible at every step, so
    // its objective settles down onto the constrained minimum; the shrunk
    // auxiliaries approach the same limit from below and are not monotone.
    double objective = 0.0;
    for (int j = 0; j < 3; ++j)
      objective += Eigen::BDCSVD<Eigen::MatrixXd>(unfold(x, j + 1)).singularValues().sum();
    out.objective_trace.push_back(objective);

    double primal_sq = 0.0, m_sq = 0.0, y_sq = 0.0;
    for (int j = 0; j < 3; ++j) {
      const Eigen::MatrixXd u = unfold(x, j + 1);
      primal_sq += (m[j] - u).squaredNorm();
      m_sq += m[j].squaredNorm();
      y_sq += y[j].squaredNorm();
      y[j] += rho * (m[j] - u);
    }
    const double primal = std::sqrt(primal_sq);
    const double dual = rho * std::sqrt(3.0) * hs_norm(x - x_prev);
    out.iterations = it + 1;

    const double scale = std::sqrt(3.0 * static_cast<double>(grid));
    const double eps_pri =
        scale * params.abs_tol + params.rel_tol * std::max(std::sqrt(m_sq), std::sqrt(3.0) * hs_norm(x));
    const double eps_dual = scale * params.abs_tol + params.rel_tol * std::sqrt(y_sq);
    if (primal <= eps_pri && dual <= eps_dual) {
      out.converged = true;
      break;
    }
    if ((it + 1) % 50 == 0) {
      if (primal > 10.0 * dual)
        rho *= 2.0;
      else if (dual > 10.0 * primal)
        rho *= 0.5;
    }
  }
  out.constraint_residual = detail::max_observed_misfit(x, obs);
  return out;
}

namespace detail {

struct TuckerModel {
  Tensor3 core;
  std::array<Eigen::MatrixXd, 3> factors;

  Tensor3 expand() const {
    Tensor3 x = core;
    for (int j = 0; j < 3; ++j) x = mode_multiply(factors[static_cast<std::size_t>(j)], x, j + 1);
    return x;
  }
};

inline double observed_residual(const TuckerModel& model, const Observations& obs) {
  const Tensor3 x = model.expand();
  double sq = 0.0;
  for (std::int64_t i = 0; i < obs.omega.n(); ++i) {
    const double diff = obs.values[i] - x.values()[obs.omega.linear()[static_cast<std::size_t>(i)]];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

// Least-squares core for fixed factors: one (r1 r2 r3)^2 normal system
// accumulated over the observations, with a small ridge.
inline void fit_core(TuckerModel& model, const Observations& obs, double ridge) {
  const std::array<int, 3> r{static_cast<int>(model.factors[0].cols()),
                             static_cast<int>(model.factors[1].cols()),
                             static_cast<int>(model.factors[2].cols())};
  const int p = r[0] * r[1] * r[2];
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd k(p);
  for (std::int64_t i = 0; i < obs.omega.n(); ++i) {
    const IndexTriple t = obs.omega.triple(i);
    int idx = 0;
    for (int s = 0; s < r[0]; ++s)
      for (int u = 0; u < r[1]; ++u)
        for (int v = 0; v < r[2]; ++v)
          k[idx++] = model.factors[0](t.a - 1, s) * model.factors[1](t.b - 1, u) * model.factors[2](t.c - 1, v);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(k);
    rhs += obs.values[i] * k;
  }
  normal.diagonal().array() += ridge;
  const Eigen::VectorXd g = normal.selfadjointView<Eigen::Lower>().ldlt().solve(rhs);
  int idx = 0;
  for (int s = 0; s < r[0]; ++s)
    for (int u = 0; u < r[1]; ++u)
      for (int v = 0; v < r[2]; ++v) model.core(s + 1, u + 1, v + 1) = g[idx++];
}

// Row-wise least squares for one factor, holding everything else fixed.
// H carries the contracted core so that the model value at (a, b, c) is the
// dot product of the factor row with an H fiber.
inline void fit_factor(TuckerModel& model, const Observations& obs, int mode, double ridge) {
  Tensor3 h = model.core;
  for (int j = 0; j < 3; ++j)
    if (j != mode - 1) h = mode_multiply(model.factors[static_cast<std::size_t>(j)], h, j + 1);
  Eigen::MatrixXd& factor = model.factors[static_cast<std::size_t>(mode - 1)];
  const int rows = static_cast<int>(factor.rows());
  const int r = static_cast<int>(factor.cols());

  std::vector<Eigen::MatrixXd> normal(static_cast<std::size_t>(rows), Eigen::MatrixXd::Zero(r, r));
  std::vector<Eigen::VectorXd> rhs(static_cast<std::size_t>(rows), Eigen::VectorXd::Zero(r));
  std::vector<bool> touched(static_cast<std::size_t>(rows), false);
  Eigen::VectorXd fiber(r);
  for (std::int64_t i = 0; i < obs.omega.n(); ++i) {
    const IndexTriple t = obs.omega.triple(i);
    const std::array<int, 3> pos{t.a, t.b, t.c};
    for (int s = 0; s < r; ++s) {
      std::array<int, 3> hp = pos;
      hp[static_cast<std::size_t>(mode - 1)] = s + 1;
      fiber[s] = h(hp[0], hp[1], hp[2]);
    }
    const auto row = static_cast<std::size_t>(pos[static_cast<std::size_t>(mode - 1)] - 1);
    normal[row].selfadjointView<Eigen::Lower>().rankUpdate(fiber);
    rhs[row] += obs.values[i] * fiber;
    touched[row] = true;
  }
  for (int a = 0; a < rows; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (!touched[ia]) continue;  // unobserved slice: no information, keep the current row
    normal[ia].diagonal().array() += ridge;
    factor.row(a) = normal[ia].selfadjointView<Eigen::Lower>().ldlt().solve(rhs[ia]).transpose();
  }
}

}  // namespace detail

inline SolveResult solve_tucker_als(const Observations& obs, std::uint64_t seed,
                                    const SolverParams& params = {}) {
  const auto& dims = obs.omega.dims();
  const std::array<int, 3>& r = params.target_ranks;
  for (int j = 0; j < 3; ++j)
    if (r[static_cast<std::size_t>(j)] < 1 || r[static_cast<std::size_t>(j)] > dims[static_cast<std::size_t>(j)])
      throw std::invalid_argument("solve_tucker_als: target ranks must satisfy 1 <= r_j <= d_j");
  if (params.als_restarts < 0 || params.als_iters < 1)
    throw std::invalid_argument("solve_tucker_als: bad iteration parameters");
  const double ridge = 1e-12;

  const Tensor3 filled = zero_filled(obs);
  SolveResult best{filled};
  double best_res = std::numeric_limits<double>::infinity();

  for (int rs = 0; rs <= params.als_restarts; ++rs) {
    detail::TuckerModel model{Tensor3(r[0], r[1], r[2]), {}};
    if (rs == 0) {
      // Spectral start: leading left singular vectors of the zero-filled unfoldings.
      for (int j = 0; j < 3; ++j) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(unfold(filled, j + 1), Eigen::ComputeThinU);
        model.factors[static_cast<std::size_t>(j)] =
            svd.matrixU().leftCols(r[static_cast<std::size_t>(j)]);
      }
    } else {
      CounterRng rng(mix(seed, mix(detail::kAlsStream, static_cast<std::uint64_t>(rs))));
      for (int j = 0; j < 3; ++j)
        model.factors[static_cast<std::size_t>(j)] =
            detail::random_orthonormal(rng, dims[static_cast<std::size_t>(j)], r[static_cast<std::size_t>(j)]);
    }
    detail::fit_core(model, obs, ridge);

    SolveResult run{filled};
    double res = detail::observed_residual(model, obs);
    run.objective_trace.push_back(res);
    for (int it = 0; it < params.als_iters; ++it) {
      for (int mode = 1; mode <= 3; ++mode) detail::fit_factor(model, obs, mode, ridge);
      detail::fit_core(model, obs, ridge);
      const double prev = res;
      res = detail::observed_residual(model, obs);
      run.objective_trace.push_back(res);
      run.iterations = it + 1;
      if (std::abs(prev - res) <= params.rel_tol * std::max(1.0, prev)) {
        run.converged = true;
        break;
      }
    }
    run.x_hat = model.expand();
    run.constraint_residual = detail::max_observed_misfit(run.x_hat, obs);
    if (res < best_res) {
      best_res = res;
      best = std::move(run);
    }
  }
  return best;
}

// ||x_hat - truth||_HS / ||truth||_HS; zero for exact recovery.
inline double relative_error(const Tensor3& x_hat, const Tensor3& truth) {
  x_hat.require_same_dims(truth);
  const double denom = hs_norm(truth);
  if (denom == 0.0) throw std::invalid_argument("relative_error: reference tensor is zero");
  return hs_norm(x_hat - truth) / denom;
}

}  // namespace tcomp

#endif  // TCOMP_SOLVER_HPP
