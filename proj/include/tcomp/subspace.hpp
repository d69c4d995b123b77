#ifndef TCOMP_SUBSPACE_HPP
#define TCOMP_SUBSPACE_HPP

// Fiber-span subspaces, Tucker ranks, coherence, and the composite
// Q-projectors.
//
// For a nonzero tensor X, the mode-j fiber span L_j(X) is the column space
// of the mode-j unfolding; its dimension r_j is the j-th Tucker rank. With
// P^j the orthogonal projector onto L_j and P^j_perp its complement, the
// ten composite projectors used throughout are
//
//   Q0 = P1 (x) P2 (x) P3          Q0perp = P1p (x) P2p (x) P3p
//   Q1 = P1p (x) P2 (x) P3         Q1perp = P1  (x) P2p (x) P3p
//   Q2 = P1 (x) P2p (x) P3         Q2perp = P1p (x) P2  (x) P3p
//   Q3 = P1 (x) P2 (x) P3p         Q3perp = P1p (x) P2p (x) P3
//   Q  = Q0+Q1+Q2+Q3               Qperp  = Q0perp+Q1perp+Q2perp+Q3perp
//
// Q aggregates the patterns with at most one complement factor and Qperp
// those with at least two. All applications are matrix-free via three mode
// multiplications per term.

#include "tcomp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace tcomp {

enum class ProjectorKind { Q0, Q1, Q2, Q3, Q, Qperp, Q0perp, Q1perp, Q2perp, Q3perp };

template <typename Scalar>
struct TuckerSubspacesT {
  using Matrix = typename Tensor3T<Scalar>::Matrix;

  std::array<Matrix, 3> bases;      // U_j, d_j x r_j, orthonormal columns
  std::array<Matrix, 3> projectors; // P_j = U_j U_j^T, cached for repeated application
  std::array<int, 3> ranks{};
  std::array<int, 3> dims{};
  Scalar rank_tol = Scalar(1e-10);
};

using TuckerSubspaces = TuckerSubspacesT<double>;

// r-bar: sqrt((r1 r2 d3 + r1 r3 d2 + r2 r3 d1) / (d1 + d2 + d3)).
inline double rbar(const std::array<int, 3>& ranks, const std::array<int, 3>& dims) {
  for (int j = 0; j < 3; ++j)
    if (ranks[j] < 1 || dims[j] < 1) throw std::invalid_argument("rbar: ranks and dims must be positive");
  const double num = static_cast<double>(ranks[0]) * ranks[1] * dims[2] +
                     static_cast<double>(ranks[0]) * ranks[2] * dims[1] +
                     static_cast<double>(ranks[1]) * ranks[2] * dims[0];
  return std::sqrt(num / (dims[0] + dims[1] + dims[2]));
}

template <typename Scalar>
TuckerSubspacesT<Scalar> fiber_subspaces(const Tensor3T<Scalar>& x, Scalar rank_tol = Scalar(1e-10)) {
  if (hs_norm(x) == Scalar(0)) throw std::invalid_argument("fiber_subspaces: zero tensor has no fiber spans");
  TuckerSubspacesT<Scalar> s;
  s.dims = x.dims();
  s.rank_tol = rank_tol;
  for (int j = 0; j < 3; ++j) {
    Eigen::JacobiSVD<typename Tensor3T<Scalar>::Matrix> svd(unfold(x, j + 1), Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv[r] >= rank_tol * sv[0]) ++r;
    s.ranks[j] = r;
    s.bases[j] = svd.matrixU().leftCols(r);
    s.projectors[j] = s.bases[j] * s.bases[j].transpose();
  }
  return s;
}

namespace detail {

// Applies P1^(e1) P2^(e2) P3^(e3) where e_j = false means P_j and
// e_j = true means its complement.
template <typename Scalar>
Tensor3T<Scalar> apply_pattern(const TuckerSubspacesT<Scalar>& s, const std::array<bool, 3>& perp,
                               const Tensor3T<Scalar>& x) {
  Tensor3T<Scalar> y = x;
  for (int j = 0; j < 3; ++j) {
    Tensor3T<Scalar> proj = mode_multiply(s.projectors[j], y, j + 1);
    if (perp[j]) {
      y -= proj;
    } else {
      y = std::move(proj);
    }
  }
  return y;
}

}  // namespace detail

template <typename Scalar>
Tensor3T<Scalar> apply_projector(const TuckerSubspacesT<Scalar>& s, ProjectorKind kind, const Tensor3T<Scalar>& x) {
  if (x.dims() != s.dims) throw std::invalid_argument("apply_projector: tensor dims do not match subspaces");
  using A = std::array<bool, 3>;
  switch (kind) {
    case ProjectorKind::Q0: return detail::apply_pattern(s, A{false, false, false}, x);
    case ProjectorKind::Q1: return detail::apply_pattern(s, A{true, false, false}, x);
    case ProjectorKind::Q2: return detail::apply_pattern(s, A{false, true, false}, x);
    case ProjectorKind::Q3: return detail::apply_pattern(s, A{false, false, true}, x);
    case ProjectorKind::Q0perp: return detail::apply_pattern(s, A{true, true, true}, x);
    case ProjectorKind::Q1perp: return detail::apply_pattern(s, A{false, true, true}, x);
    case ProjectorKind::Q2perp: return detail::apply_pattern(s, A{true, false, true}, x);
    case ProjectorKind::Q3perp: return detail::apply_pattern(s, A{true, true, false}, x);
    case ProjectorKind::Q: {
      Tensor3T<Scalar> y = detail::apply_pattern(s, A{false, false, false}, x);
      y += detail::apply_pattern(s, A{true, false, false}, x);
      y += detail::apply_pattern(s, A{false, true, false}, x);
      y += detail::apply_pattern(s, A{false, false, true}, x);
      return y;
    }
    case ProjectorKind::Qperp: {
      Tensor3T<Scalar> y = detail::apply_pattern(s, A{true, true, true}, x);
      y += detail::apply_pattern(s, A{false, true, true}, x);
      y += detail::apply_pattern(s, A{true, false, true}, x);
      y += detail::apply_pattern(s, A{true, true, false}, x);
      return y;
    }
  }
  throw std::invalid_argument("apply_projector: unknown projector kind");
}

// rank(Q_T) = d1 r2 r3 + (d2-r2) r1 r3 + (d3-r3) r1 r2; equals the trace of
// the assembled Q_T operator.
template <typename Scalar>
std::int64_t projector_rank(const TuckerSubspacesT<Scalar>& s) {
  const auto& r = s.ranks;
  const auto& d = s.dims;
  return std::int64_t{d[0]} * r[1] * r[2] + std::int64_t{d[1] - r[1]} * r[0] * r[2] +
         std::int64_t{d[2] - r[2]} * r[0] * r[1];
}

// Coherence of a subspace given by an orthonormal basis U (k x r):
// mu(U) = (k/r) max_i ||P_U e_i||^2, between 1 and k/r.
template <typename Derived>
double mu_subspace(const Eigen::MatrixBase<Derived>& u) {
  const auto k = u.rows();
  const auto r = u.cols();
  if (r < 1 || k < r) throw std::invalid_argument("mu_subspace: need a k x r basis with 1 <= r <= k");
  const double max_row = u.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(k) / static_cast<double>(r) * max_row;
}

struct CoherenceProfile {
  double mu = 0.0;          // max of the three subspace coherences, always >= 1
  double alpha = 0.0;       // sqrt(d1 d2 d3 / rbar) * ||W||_max
  double alpha_tilde = 0.0; // sqrt(d1 d2 d3) * ||W||_max / ||W||_HS
  double rbar = 0.0;
};

template <typename Scalar>
CoherenceProfile coherence_profile(const TuckerSubspacesT<Scalar>& s, const Tensor3T<Scalar>& w) {
  if (w.dims() != s.dims) throw std::invalid_argument("coherence_profile: witness dims do not match subspaces");
  CoherenceProfile p;
  p.mu = std::max({mu_subspace(s.bases[0]), mu_subspace(s.bases[1]), mu_subspace(s.bases[2])});
  p.rbar = rbar(s.ranks, s.dims);
  const double grid = static_cast<double>(s.dims[0]) * s.dims[1] * s.dims[2];
  const double wmax = max_norm(w);
  const double whs = hs_norm(w);
  p.alpha = std::sqrt(grid / p.rbar) * wmax;
  p.alpha_tilde = whs > 0 ? std::sqrt(grid) * wmax / whs : 0.0;
  return p;
}

}  // namespace tcomp

#endif  // TCOMP_SUBSPACE_HPP
