#ifndef TCOMP_NORMS_HPP
#define TCOMP_NORMS_HPP

// Spectral-norm estimation, the digitalized exact maximization with its
// 8x bracket, nuclear norm and dual witness for orthogonally decomposable
// tensors, and the digitalization operator.
//
// The spectral norm ||X|| = max <X, u (x) v (x) w> over unit vectors is
// NP-hard in general. Two estimators are provided:
//   * spectral_norm_hopm: alternating rank-one maximization (higher-order
//     power method) with warm starts; a certified lower bound.
//   * spectral_norm_digitalized: exact maximization over digital vectors
//     with entries in {0, +-2^(-j/2)}; the result M satisfies
//     M <= ||X|| <= 8 M, so it brackets the truth from both sides.

#include "tcomp/rng.hpp"
#include "tcomp/subspace.hpp"
#include "tcomp/tensor.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcomp {

struct SpectralEstimate {
  double value = 0.0;   // = <outer(u,v,w), X> for the reported maximizer, >= 0
  Eigen::VectorXd u, v, w;
  int restarts_used = 0;
  bool converged = false;
};

namespace detail {

// Fixed key for the random restarts of the power method; restart i uses
// stream mix(kHopmStream, i), so results never depend on scheduling.
inline constexpr std::uint64_t kHopmStream = 0x48504f4d00000001ULL;
inline constexpr std::uint64_t kCmdStream = 0x434d440000000001ULL;

template <typename Scalar>
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Contraction of X against vectors in the two other modes. With canonical
// storage (c fastest) the tensor doubles as the row-major matrices
// (d1*d2) x d3 and d1 x (d2*d3), which covers all three contractions.
template <typename Scalar>
void contract_all(const Tensor3T<Scalar>& x, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& w, Eigen::VectorXd* out1, Eigen::VectorXd* out2,
                  Eigen::VectorXd* out3) {
  const int d1 = x.d1(), d2 = x.d2(), d3 = x.d3();
  RowMajorMap<Scalar> flat12(x.values().data(), std::int64_t{d1} * d2, d3);
  if (out1 || out2) {
    const Eigen::VectorXd zw = flat12.template cast<double>() * w;  // zw(a,b) = sum_c X(a,b,c) w_c
    RowMajorMap<double> z(zw.data(), d1, d2);
    if (out1) *out1 = z * v;
    if (out2) *out2 = z.transpose() * u;
  }
  if (out3) {
    RowMajorMap<Scalar> flat1(x.values().data(), d1, std::int64_t{d2} * d3);
    const Eigen::VectorXd zu = flat1.template cast<double>().transpose() * u;  // zu(b,c) = sum_a u_a X(a,b,c)
    RowMajorMap<double> z(zu.data(), d2, d3);
    *out3 = z.transpose() * v;
  }
}

inline Eigen::VectorXd random_unit(CounterRng& rng, int d) {
  Eigen::VectorXd v(d);
  double nrm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
    nrm = v.norm();
  } while (nrm == 0.0);
  return v / nrm;
}

}  // namespace detail

// Higher-order power method. Restart 0 warm-starts from the leading left
// singular vectors of the three unfoldings, restart 1 from the basis triple
// of the largest-magnitude entry (the iteration never decreases the
// correlation, so the result is at least ||X||_max); the rest start from
// seeded uniform-random unit vectors. Reported value is the best
// correlation found, a lower bound on ||X||.
template <typename Scalar>
SpectralEstimate spectral_norm_hopm(const Tensor3T<Scalar>& x, int restarts = 32, double tol = 1e-12,
                                    int max_iters = 500) {
  if (restarts < 1) throw std::invalid_argument("spectral_norm_hopm: restarts must be >= 1");
  if (hs_norm(x) == Scalar(0)) throw std::invalid_argument("spectral_norm_hopm: zero tensor");

  std::array<Eigen::VectorXd, 3> warm;
  for (int j = 0; j < 3; ++j) {
    Eigen::JacobiSVD<typename Tensor3T<Scalar>::Matrix> svd(unfold(x, j + 1), Eigen::ComputeThinU);
    warm[j] = svd.matrixU().col(0).template cast<double>();
  }

  std::int64_t peak = 0;
  for (std::int64_t i = 0; i < x.size(); ++i)
    if (std::abs(x.values()[i]) > std::abs(x.values()[peak])) peak = i;
  const std::int64_t peak_c = peak % x.d3();
  const std::int64_t peak_b = (peak / x.d3()) % x.d2();
  const std::int64_t peak_a = peak / (std::int64_t{x.d2()} * x.d3());

  SpectralEstimate best;
  for (int rs = 0; rs < restarts; ++rs) {
    Eigen::VectorXd u, v, w;
    if (rs == 0) {
      u = warm[0];
      v = warm[1];
      w = warm[2];
    } else if (rs == 1) {
      u = Eigen::VectorXd::Unit(x.d1(), static_cast<Eigen::Index>(peak_a));
      v = Eigen::VectorXd::Unit(x.d2(), static_cast<Eigen::Index>(peak_b));
      w = Eigen::VectorXd::Unit(x.d3(), static_cast<Eigen::Index>(peak_c));
    } else {
      CounterRng rng(mix(detail::kHopmStream, static_cast<std::uint64_t>(rs)));
      u = detail::random_unit(rng, x.d1());
      v = detail::random_unit(rng, x.d2());
      w = detail::random_unit(rng, x.d3());
    }

    double value = 0.0;
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
      Eigen::VectorXd t1, t2, t3;
      detail::contract_all(x, u, v, w, &t1, nullptr, nullptr);
      if (t1.norm() > 0) u = t1 / t1.norm();
      detail::contract_all(x, u, v, w, nullptr, &t2, nullptr);
      if (t2.norm() > 0) v = t2 / t2.norm();
      detail::contract_all(x, u, v, w, nullptr, nullptr, &t3);
      const double nt3 = t3.norm();
      if (nt3 > 0) w = t3 / nt3;
      const double prev = value;
      value = nt3;  // = <X, u (x) v (x) w> after normalizing w along t3
      if (it > 0 && std::abs(value - prev) <= tol * std::max(1.0, std::abs(value))) {
        converged = true;
        break;
      }
    }
    if (value > best.value) {
      best.value = value;
      best.u = u;
      best.v = v;
      best.w = w;
      best.converged = converged;
    }
    best.restarts_used = rs + 1;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Digital vector sets B_{m,d}: entries in {0, +-1, +-2^(-1/2), ..., +-2^(-m/2)}
// and Euclidean norm <= 1.

// Exact count of B_{m,d}, saturating at `cap` so oversized requests can be
// rejected cheaply. Counting runs over the number of entries held at each
// magnitude level with an integer norm budget scaled by 2^m.
inline std::uint64_t count_digital_vectors(int m, int d, std::uint64_t cap = std::uint64_t(4) << 60) {
  if (m < 0 || d < 1) throw std::invalid_argument("count_digital_vectors: need m >= 0, d >= 1");
  // f(pos, budget): vectors for `pos` remaining entries and remaining scaled
  // squared norm `budget`, where level j costs 2^(m-j) per entry.
  const std::int64_t full = std::int64_t{1} << m;
  std::vector<std::uint64_t> cur(static_cast<std::size_t>(full) + 1, 1);  // pos = 0
  std::vector<std::uint64_t> next(cur.size());
  auto sat_add = [&](std::uint64_t a, std::uint64_t b) { return (a > cap - b) ? cap : a + b; };
  for (int pos = 1; pos <= d; ++pos) {
    for (std::int64_t budget = 0; budget <= full; ++budget) {
      std::uint64_t total = cur[budget];  // entry = 0
      for (int j = 0; j <= m; ++j) {
        const std::int64_t cost = std::int64_t{1} << (m - j);
        if (cost <= budget) total = sat_add(total, sat_add(cur[budget - cost], cur[budget - cost]));
        if (total >= cap) {
          total = cap;
          break;
        }
      }
      next[budget] = total;
    }
    cur.swap(next);
  }
  return cur[full];
}

// Enumeration of B_{m,d} as rows of a matrix.
inline Eigen::MatrixXd digital_vectors(int m, int d) {
  std::vector<double> symbols{0.0};
  std::vector<double> costs{0.0};
  for (int j = 0; j <= m; ++j) {
    const double mag = std::pow(2.0, -0.5 * j);
    symbols.push_back(mag);
    symbols.push_back(-mag);
    costs.push_back(mag * mag);
    costs.push_back(mag * mag);
  }
  std::vector<Eigen::VectorXd> rows;
  Eigen::VectorXd work(d);
  const double budget = 1.0 + 1e-12;
  auto dfs = [&](auto&& self, int pos, double used) -> void {
    if (pos == d) {
      rows.push_back(work);
      return;
    }
    for (std::size_t s = 0; s < symbols.size(); ++s) {
      if (used + costs[s] > budget) continue;
      work[pos] = symbols[s];
      self(self, pos + 1, used + costs[s]);
    }
  };
  dfs(dfs, 0, 0.0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = rows[static_cast<std::size_t>(i)];
  return out;
}

struct DigitalSet {
  int m = 0;
  int d = 0;
  Eigen::MatrixXd vectors;  // one digital vector per row
};

inline DigitalSet digital_set(int m, int d) { return {m, d, digital_vectors(m, d)}; }

inline int digital_depth(int d) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(d))));
}

// Number of digital triples the exact maximization must visit.
inline double digital_enumeration_size(const std::array<int, 3>& dims) {
  double product = 1.0;
  for (const int d : dims) product *= static_cast<double>(count_digital_vectors(digital_depth(d), d));
  return product;
}

inline bool digital_enumeration_feasible(const std::array<int, 3>& dims) {
  return digital_enumeration_size(dims) <= 1e8;
}

// Exact maximum of <u (x) v (x) w, X> over the digital sets with depths
// m_j = ceil(log2 d_j). Lower-bounds ||X|| and over-estimates it by at most
// a factor 8: M <= ||X|| <= 8 M.
template <typename Scalar>
double spectral_norm_digitalized(const Tensor3T<Scalar>& x) {
  const std::array<int, 3> d{x.d1(), x.d2(), x.d3()};
  std::array<int, 3> m;
  double product = 1.0;
  for (int j = 0; j < 3; ++j) {
    m[j] = digital_depth(d[j]);
    product *= static_cast<double>(count_digital_vectors(m[j], d[j]));
  }
  if (product > 1e8)
    throw std::length_error("spectral_norm_digitalized: digital sets too large to enumerate (" +
                            std::to_string(product) + " triples; limit 1e8)");

  const Eigen::MatrixXd b1 = digital_vectors(m[0], d[0]);
  const Eigen::MatrixXd b2 = digital_vectors(m[1], d[1]);
  const Eigen::MatrixXd b3 = digital_vectors(m[2], d[2]);
  detail::RowMajorMap<Scalar> flat1(x.values().data(), d[0], std::int64_t{d[1]} * d[2]);

  double best = 0.0;
  for (Eigen::Index i = 0; i < b1.rows(); ++i) {
    const Eigen::VectorXd slice = flat1.template cast<double>().transpose() * b1.row(i).transpose();
    detail::RowMajorMap<double> z(slice.data(), d[1], d[2]);
    // max over v, w of |v^T (u-slice) w| in two dense products
    best = std::max(best, ((b2 * z) * b3.transpose()).array().abs().maxCoeff());
  }
  return best;
}

// Thinning constant C_{m,d} = min over unit a of max_{u in B_{m,d}} u^T a,
// estimated by sampling unit vectors. Sampling overshoots the true minimum,
// and C_{m,d} >= 1/2 with 1/C_{m,d} <= sqrt(2 + 2(d-1)/(2^m - 1)).
inline double c_md(int m, int d, int sphere_samples) {
  if (d > 6) throw std::invalid_argument("c_md: enumeration estimate limited to d <= 6");
  if (m < 0 || d < 1 || sphere_samples < 1) throw std::invalid_argument("c_md: bad parameters");
  const Eigen::MatrixXd b = digital_vectors(m, d);
  CounterRng rng(detail::kCmdStream);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sphere_samples; ++s) {
    const Eigen::VectorXd a = detail::random_unit(rng, d);
    worst = std::min(worst, (b * a).maxCoeff());
  }
  return worst;
}

// Digitalization: keeps exactly the entries with |value| = 2^(-j/2)
// (absolute tolerance 1e-12), zeroing everything else.
template <typename Scalar>
Tensor3T<Scalar> digitalize(const Tensor3T<Scalar>& x, int j) {
  if (j < 0) throw std::invalid_argument("digitalize: j must be >= 0");
  const double mag = std::pow(2.0, -0.5 * j);
  Tensor3T<Scalar> y(x.d1(), x.d2(), x.d3());
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const Scalar val = x.values()[i];
    if (std::abs(std::abs(val) - mag) <= 1e-12) y.values()[i] = val;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Orthogonally decomposable tensors: T = sum_i lambda_i u_i (x) v_i (x) w_i
// with each factor family orthonormal. For these the nuclear norm is
// sum lambda_i, attained by the witness W = sum_i u_i (x) v_i (x) w_i.

struct OrthoDecomposition {
  Eigen::VectorXd lambda;  // positive weights, length r
  Eigen::MatrixXd u, v, w; // d_j x r, orthonormal columns

  int r() const { return static_cast<int>(lambda.size()); }

  void validate() const {
    const int rr = r();
    if (rr < 1) throw std::invalid_argument("decomposition needs at least one term");
    if (u.cols() != rr || v.cols() != rr || w.cols() != rr)
      throw std::invalid_argument("factor column counts must match weight count");
    if (rr > std::min({u.rows(), v.rows(), w.rows()}))
      throw std::invalid_argument("more terms than the smallest dimension allows");
    for (int i = 0; i < rr; ++i)
      if (!(lambda[i] > 0)) throw std::invalid_argument("weights must be positive");
    for (const auto* f : {&u, &v, &w}) {
      const Eigen::MatrixXd gram = f->transpose() * (*f);
      if ((gram - Eigen::MatrixXd::Identity(rr, rr)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("factor families must be orthonormal (tolerance 1e-10)");
    }
  }

  Tensor3 tensor() const {
    validate();
    FactorTriple f{u, v, w * lambda.asDiagonal()};
    return from_factors(f);
  }
};

inline double nuclear_norm_ortho(const OrthoDecomposition& dec) {
  dec.validate();
  return dec.lambda.sum();
}

// Random orthogonally decomposable instance with spread factors: each factor
// column starts as a random sign vector at flat magnitude plus 5% gaussian
// jitter, and the family is then orthonormalized. Keeping the mode subspaces
// near minimal coherence makes sampled instances representative of what
// entrywise observation can recover; gaussian factors at these small
// dimensions routinely produce subspaces too aligned with the axes.
// An empty weight vector selects unit weights.
inline OrthoDecomposition sample_spread_decomposition(const std::array<int, 3>& dims, int r,
                                                      const std::vector<double>& weights,
                                                      std::uint64_t seed) {
  if (r < 1 || r > std::min({dims[0], dims[1], dims[2]}))
    throw std::invalid_argument("sample_spread_decomposition: need 1 <= r <= min(dims)");
  if (!weights.empty() && static_cast<int>(weights.size()) != r)
    throw std::invalid_argument("sample_spread_decomposition: weights length must equal r");

  OrthoDecomposition dec;
  dec.lambda = Eigen::VectorXd::Ones(r);
  for (std::size_t i = 0; i < weights.size(); ++i)
    dec.lambda[static_cast<Eigen::Index>(i)] = weights[i];

  Eigen::MatrixXd* factors[3] = {&dec.u, &dec.v, &dec.w};
  for (int j = 0; j < 3; ++j) {
    const int d = dims[static_cast<std::size_t>(j)];
    CounterRng rng(mix(seed, static_cast<std::uint64_t>(j + 1)));
    Eigen::MatrixXd g(d, r);
    for (int c = 0; c < r; ++c)
      for (int a = 0; a < d; ++a)
        g(a, c) = ((rng.next_u64() & 1ull) ? 1.0 : -1.0) + 0.05 * rng.next_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    *factors[j] = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
  }
  dec.validate();
  return dec;
}

// Dual witness W = sum_i u_i (x) v_i (x) w_i, with ||W|| = 1, Q0_T W = W,
// <T, W> = sum lambda_i and ||W||_HS^2 = r. All four are re-checked
// numerically before returning.
inline Tensor3 dual_witness(const OrthoDecomposition& dec) {
  dec.validate();
  FactorTriple f{dec.u, dec.v, dec.w};
  Tensor3 wit = from_factors(f);

  const double r = static_cast<double>(dec.r());
  const double hs2 = hs_norm(wit) * hs_norm(wit);
  if (std::abs(hs2 - r) > 1e-8 * std::max(1.0, r))
    throw std::runtime_error("dual_witness: ||W||_HS^2 deviates from the term count");

  const Tensor3 t = dec.tensor();
  const double pairing = inner(t, wit);
  const double want = dec.lambda.sum();
  if (std::abs(pairing - want) > 1e-8 * std::max(1.0, want))
    throw std::runtime_error("dual_witness: <T, W> deviates from the weight sum");

  const TuckerSubspaces sub = fiber_subspaces(t);
  const Tensor3 q0w = apply_projector(sub, ProjectorKind::Q0, wit);
  if (hs_norm(q0w - wit) > 1e-8 * std::max(1.0, hs_norm(wit)))
    throw std::runtime_error("dual_witness: W escapes the range of Q0_T");

  const SpectralEstimate est = spectral_norm_hopm(wit, 4);
  if (std::abs(est.value - 1.0) > 1e-8)
    throw std::runtime_error("dual_witness: spectral norm of W deviates from 1");

  return wit;
}

// Subgradient inequality ||Y||_* >= ||X||_* + <W + Q_{Xperp} Wperp, Y - X>
// for the witness W of X and any Wperp with ||Wperp|| <= 1/2. The verdict
// is evaluated numerically whatever the norm of Wperp, so the sharpness of
// the 1/2 cap can be probed; cap_satisfied reports whether the guarantee
// applies. Inputs whose claimed witness exceeds spectral norm 1 by more
// than 1e-6 are rejected.
struct SubgradCheck {
  bool holds = false;
  bool cap_satisfied = false;
  double lhs = 0.0;  // ||Y||_*
  double rhs = 0.0;  // ||X||_* + <W + Q_perp Wperp, Y - X>
};

inline SubgradCheck subgrad_inequality_check(const OrthoDecomposition& t, const OrthoDecomposition& y,
                                             const Tensor3& wperp) {
  const Tensor3 tt = t.tensor();
  const Tensor3 ty = y.tensor();
  tt.require_same_dims(ty);
  tt.require_same_dims(wperp);

  const double wperp_norm = hs_norm(wperp) == 0.0 ? 0.0 : spectral_norm_hopm(wperp, 8).value;
  if (wperp_norm > 1.0 + 1e-6)
    throw std::invalid_argument("subgrad_inequality_check: witness norm violation (spectral norm > 1)");

  const Tensor3 wit = dual_witness(t);
  const TuckerSubspaces sub = fiber_subspaces(tt);
  const Tensor3 proj = apply_projector(sub, ProjectorKind::Qperp, wperp);

  SubgradCheck out;
  out.cap_satisfied = wperp_norm <= 0.5 + 1e-9;
  out.lhs = nuclear_norm_ortho(y);
  out.rhs = nuclear_norm_ortho(t) + inner(wit + proj, ty - tt);
  out.holds = out.lhs - out.rhs >= -1e-9;
  return out;
}

}  // namespace tcomp

#endif  // TCOMP_NORMS_HPP
