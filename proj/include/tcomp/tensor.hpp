#ifndef TCOMP_TENSOR_HPP
#define TCOMP_TENSOR_HPP

// Dense third-order tensor value type and its elementary algebra.
//
// Entries are stored in canonical order: index (a,b,c) with c varying
// fastest, then b, then a. Every index at the API boundary is 1-based.
// Unfolding column order and the text file format both derive from the
// canonical order, so round trips are bit-exact.

#include <Eigen/Dense>

#include <array>
#include <cassert>
#include <cstdint>
#include <stdexcept>

namespace tcomp {

struct IndexTriple {
  int a = 1, b = 1, c = 1;

  friend bool operator==(const IndexTriple& x, const IndexTriple& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c;
  }
};

template <typename Scalar>
class Tensor3T {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Tensor3T(int d1, int d2, int d3) : d_{d1, d2, d3} {
    check_dims();
    values_ = Vector::Zero(size());
  }

  Tensor3T(int d1, int d2, int d3, Vector values) : d_{d1, d2, d3}, values_(std::move(values)) {
    check_dims();
    if (values_.size() != size()) throw std::invalid_argument("tensor value count does not match dims");
    if (!values_.allFinite()) throw std::invalid_argument("tensor entries must be finite");
  }

  int d1() const { return d_[0]; }
  int d2() const { return d_[1]; }
  int d3() const { return d_[2]; }
  const std::array<int, 3>& dims() const { return d_; }
  std::int64_t size() const { return std::int64_t{1} * d_[0] * d_[1] * d_[2]; }

  // 1-based entry access.
  Scalar operator()(int a, int b, int c) const { return values_[offset(a, b, c)]; }
  Scalar& operator()(int a, int b, int c) { return values_[offset(a, b, c)]; }
  Scalar at(const IndexTriple& t) const { return values_[offset(t.a, t.b, t.c)]; }
  Scalar& at(const IndexTriple& t) { return values_[offset(t.a, t.b, t.c)]; }

  std::int64_t offset(int a, int b, int c) const {
    assert(1 <= a && a <= d_[0] && 1 <= b && b <= d_[1] && 1 <= c && c <= d_[2]);
    return (std::int64_t{a - 1} * d_[1] + (b - 1)) * d_[2] + (c - 1);
  }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  Tensor3T& operator+=(const Tensor3T& o) {
    require_same_dims(o);
    values_ += o.values_;
    return *this;
  }
  Tensor3T& operator-=(const Tensor3T& o) {
    require_same_dims(o);
    values_ -= o.values_;
    return *this;
  }
  Tensor3T& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }
  friend Tensor3T operator+(Tensor3T x, const Tensor3T& y) { return x += y; }
  friend Tensor3T operator-(Tensor3T x, const Tensor3T& y) { return x -= y; }
  friend Tensor3T operator*(Scalar s, Tensor3T x) { return x *= s; }

  void require_same_dims(const Tensor3T& o) const {
    if (d_ != o.d_) throw std::invalid_argument("tensor dimensions do not match");
  }

 private:
  void check_dims() const {
    if (d_[0] < 1 || d_[1] < 1 || d_[2] < 1) throw std::invalid_argument("tensor dims must be positive");
  }

  std::array<int, 3> d_;
  Vector values_;
};

using Tensor3 = Tensor3T<double>;

template <typename Scalar>
struct FactorTripleT {
  typename Tensor3T<Scalar>::Matrix A, B, C;  // d1 x r, d2 x r, d3 x r

  int r() const {
    if (A.cols() != B.cols() || B.cols() != C.cols())
      throw std::invalid_argument("factor matrices must share column count");
    if (A.cols() < 1) throw std::invalid_argument("factor matrices need at least one column");
    return static_cast<int>(A.cols());
  }
};

using FactorTriple = FactorTripleT<double>;

template <typename Scalar>
Scalar inner(const Tensor3T<Scalar>& x, const Tensor3T<Scalar>& y) {
  x.require_same_dims(y);
  return x.values().dot(y.values());
}

template <typename Scalar>
Scalar hs_norm(const Tensor3T<Scalar>& x) {
  return x.values().norm();
}

template <typename Scalar>
Scalar max_norm(const Tensor3T<Scalar>& x) {
  return x.values().template lpNorm<Eigen::Infinity>();
}

template <typename Scalar>
struct Norms {
  Scalar hs;
  Scalar max;
};

template <typename Scalar>
Norms<Scalar> norms(const Tensor3T<Scalar>& x) {
  return {hs_norm(x), max_norm(x)};
}

template <typename U, typename V, typename W>
Tensor3T<typename U::Scalar> outer(const Eigen::MatrixBase<U>& u, const Eigen::MatrixBase<V>& v,
                                   const Eigen::MatrixBase<W>& w) {
  using Scalar = typename U::Scalar;
  if (u.size() < 1 || v.size() < 1 || w.size() < 1) throw std::invalid_argument("outer: empty vector");
  Tensor3T<Scalar> t(static_cast<int>(u.size()), static_cast<int>(v.size()), static_cast<int>(w.size()));
  std::int64_t p = 0;
  for (int a = 0; a < u.size(); ++a)
    for (int b = 0; b < v.size(); ++b)
      for (int c = 0; c < w.size(); ++c) t.values()[p++] = u[a] * v[b] * w[c];
  return t;
}

template <typename Scalar>
Tensor3T<Scalar> from_factors(const FactorTripleT<Scalar>& f) {
  const int r = f.r();
  if (f.A.rows() < 1 || f.B.rows() < 1 || f.C.rows() < 1) throw std::invalid_argument("from_factors: empty factor");
  Tensor3T<Scalar> t(static_cast<int>(f.A.rows()), static_cast<int>(f.B.rows()), static_cast<int>(f.C.rows()));
  for (int k = 0; k < r; ++k) {
    std::int64_t p = 0;
    for (int a = 0; a < f.A.rows(); ++a)
      for (int b = 0; b < f.B.rows(); ++b)
        for (int c = 0; c < f.C.rows(); ++c) t.values()[p++] += f.A(a, k) * f.B(b, k) * f.C(c, k);
  }
  return t;
}

// Mode-j unfolding: a d_j x (product of the other dims) matrix whose columns
// are the mode-j fibers, columns ordered by the remaining indices in
// canonical order (later index fastest):
//   mode 1: column (b-1)*d3 + (c-1)
//   mode 2: column (a-1)*d3 + (c-1)
//   mode 3: column (a-1)*d2 + (b-1)
template <typename Scalar>
typename Tensor3T<Scalar>::Matrix unfold(const Tensor3T<Scalar>& x, int mode) {
  const int d1 = x.d1(), d2 = x.d2(), d3 = x.d3();
  typename Tensor3T<Scalar>::Matrix m;
  switch (mode) {
    case 1:
      m.resize(d1, std::int64_t{d2} * d3);
      for (int a = 1; a <= d1; ++a)
        for (int b = 1; b <= d2; ++b)
          for (int c = 1; c <= d3; ++c) m(a - 1, std::int64_t{b - 1} * d3 + (c - 1)) = x(a, b, c);
      break;
    case 2:
      m.resize(d2, std::int64_t{d1} * d3);
      for (int a = 1; a <= d1; ++a)
        for (int b = 1; b <= d2; ++b)
          for (int c = 1; c <= d3; ++c) m(b - 1, std::int64_t{a - 1} * d3 + (c - 1)) = x(a, b, c);
      break;
    case 3:
      m.resize(d3, std::int64_t{d1} * d2);
      for (int a = 1; a <= d1; ++a)
        for (int b = 1; b <= d2; ++b)
          for (int c = 1; c <= d3; ++c) m(c - 1, std::int64_t{a - 1} * d2 + (b - 1)) = x(a, b, c);
      break;
    default:
      throw std::invalid_argument("unfold: mode must be 1, 2 or 3");
  }
  return m;
}

template <typename Scalar>
Tensor3T<Scalar> refold(const typename Tensor3T<Scalar>::Matrix& m, int mode, const std::array<int, 3>& dims) {
  const int d1 = dims[0], d2 = dims[1], d3 = dims[2];
  Tensor3T<Scalar> x(d1, d2, d3);
  const std::array<std::int64_t, 3> expect_cols{std::int64_t{d2} * d3, std::int64_t{d1} * d3,
                                                std::int64_t{d1} * d2};
  if (mode < 1 || mode > 3) throw std::invalid_argument("refold: mode must be 1, 2 or 3");
  if (m.rows() != dims[mode - 1] || m.cols() != expect_cols[mode - 1])
    throw std::invalid_argument("refold: matrix shape does not match dims");
  for (int a = 1; a <= d1; ++a)
    for (int b = 1; b <= d2; ++b)
      for (int c = 1; c <= d3; ++c) {
        switch (mode) {
          case 1: x(a, b, c) = m(a - 1, std::int64_t{b - 1} * d3 + (c - 1)); break;
          case 2: x(a, b, c) = m(b - 1, std::int64_t{a - 1} * d3 + (c - 1)); break;
          case 3: x(a, b, c) = m(c - 1, std::int64_t{a - 1} * d2 + (b - 1)); break;
        }
      }
  return x;
}

// Marginal multiplication: contracts M against mode j, so that
// M x_1 [A,B,C] = [MA, B, C] and likewise for the other modes.
template <typename M, typename Scalar>
Tensor3T<Scalar> mode_multiply(const Eigen::MatrixBase<M>& m, const Tensor3T<Scalar>& x, int mode) {
  if (mode < 1 || mode > 3) throw std::invalid_argument("mode_multiply: mode must be 1, 2 or 3");
  if (m.cols() != x.dims()[mode - 1]) throw std::invalid_argument("mode_multiply: matrix columns must match dim");
  std::array<int, 3> out_dims = x.dims();
  out_dims[mode - 1] = static_cast<int>(m.rows());
  return refold<Scalar>(m * unfold(x, mode), mode, out_dims);
}

}  // namespace tcomp

#endif  // TCOMP_TENSOR_HPP
