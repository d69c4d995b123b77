#ifndef TCOMP_SAMPLING_HPP
#define TCOMP_SAMPLING_HPP

// Observation patterns: a set Omega of n grid points drawn uniformly
// without replacement, an i.i.d.-style resampling of Omega that admits
// repeats (so independent batches can be carved out of it), batch
// splitting, and fiber-occupancy statistics.

#include "tcomp/rng.hpp"
#include "tcomp/tensor.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace tcomp {

// Sorted set of observed grid points on a d1 x d2 x d3 grid.
class SampleSet {
 public:
  SampleSet(const std::array<int, 3>& dims, std::vector<std::int64_t> linear_sorted)
      : dims_(dims), linear_(std::move(linear_sorted)) {
    const std::int64_t grid = std::int64_t{dims_[0]} * dims_[1] * dims_[2];
    if (grid < 1) throw std::invalid_argument("SampleSet: dims must be positive");
    for (std::size_t i = 0; i < linear_.size(); ++i) {
      if (linear_[i] < 0 || linear_[i] >= grid) throw std::invalid_argument("SampleSet: index out of range");
      if (i > 0 && linear_[i] <= linear_[i - 1]) throw std::invalid_argument("SampleSet: indices must be strictly increasing");
    }
  }

  const std::array<int, 3>& dims() const { return dims_; }
  std::int64_t n() const { return static_cast<std::int64_t>(linear_.size()); }
  const std::vector<std::int64_t>& linear() const { return linear_; }

  IndexTriple triple(std::int64_t i) const { return unrank(linear_.at(static_cast<std::size_t>(i))); }

  bool contains(const IndexTriple& t) const {
    const std::int64_t key = rank(t);
    return std::binary_search(linear_.begin(), linear_.end(), key);
  }

  std::int64_t rank(const IndexTriple& t) const {
    if (t.a < 1 || t.a > dims_[0] || t.b < 1 || t.b > dims_[1] || t.c < 1 || t.c > dims_[2])
      throw std::out_of_range("SampleSet: triple outside the grid");
    return (std::int64_t{t.a - 1} * dims_[1] + (t.b - 1)) * dims_[2] + (t.c - 1);
  }

  IndexTriple unrank(std::int64_t key) const {
    const int c = static_cast<int>(key % dims_[2]);
    key /= dims_[2];
    const int b = static_cast<int>(key % dims_[1]);
    const int a = static_cast<int>(key / dims_[1]);
    return {a + 1, b + 1, c + 1};
  }

 private:
  std::array<int, 3> dims_;
  std::vector<std::int64_t> linear_;
};

// n grid points uniformly without replacement, via a sparse Fisher-Yates
// shuffle (only displaced slots are stored).
inline SampleSet sample_omega(const std::array<int, 3>& dims, std::int64_t n, std::uint64_t seed) {
  const std::int64_t grid = std::int64_t{dims[0]} * dims[1] * dims[2];
  if (grid < 1) throw std::invalid_argument("sample_omega: dims must be positive");
  if (n < 1 || n > grid) throw std::invalid_argument("sample_omega: need 1 <= n <= d1*d2*d3");
  CounterRng rng(seed);
  std::unordered_map<std::int64_t, std::int64_t> displaced;
  displaced.reserve(static_cast<std::size_t>(2 * n));
  std::vector<std::int64_t> picked(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(grid - i)));
    const auto it_j = displaced.find(j);
    const std::int64_t value_j = (it_j == displaced.end()) ? j : it_j->second;
    const auto it_i = displaced.find(i);
    displaced[j] = (it_i == displaced.end()) ? i : it_i->second;
    picked[static_cast<std::size_t>(i)] = value_j;
  }
  std::sort(picked.begin(), picked.end());
  return SampleSet(dims, std::move(picked));
}

// Resampled observation sequence; repeats are allowed by construction.
struct IidSequence {
  std::array<int, 3> dims{};
  std::vector<IndexTriple> triples;
};

// Draws `draws` points so that each is marginally uniform on the grid while
// the set of distinct points stays inside Omega. Maintaining S = points
// seen so far: with probability |S| / (d1 d2 d3) the next point is uniform
// on S, otherwise uniform on Omega \ S. When draws == |Omega| the leftover
// pool cannot empty before the last draw; for longer sequences, once
// Omega \ S is exhausted the draw falls back to uniform on S.
inline IidSequence iid_from_omega(const SampleSet& omega, std::int64_t draws, std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("iid_from_omega: need at least one draw");
  const std::int64_t grid = std::int64_t{omega.dims()[0]} * omega.dims()[1] * omega.dims()[2];
  CounterRng rng(seed);

  std::vector<std::int64_t> seen;                  // S, insertion order
  std::vector<std::int64_t> pool = omega.linear(); // Omega \ S, order-free
  seen.reserve(static_cast<std::size_t>(std::min(draws, omega.n())));

  IidSequence out;
  out.dims = omega.dims();
  out.triples.reserve(static_cast<std::size_t>(draws));
  for (std::int64_t i = 0; i < draws; ++i) {
    std::int64_t key = -1;
    const bool reuse = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(grid))) <
                       static_cast<std::int64_t>(seen.size());
    if (reuse || pool.empty()) {
      key = seen[static_cast<std::size_t>(rng.below(seen.size()))];
    } else {
      const std::size_t j = static_cast<std::size_t>(rng.below(pool.size()));
      key = pool[j];
      pool[j] = pool.back();
      pool.pop_back();
      seen.push_back(key);
    }
    out.triples.push_back(omega.unrank(key));
  }
  return out;
}

// Consecutive batches Omega_k = {draws (k-1)*n1+1 .. k*n1}, k = 1..n2.
struct BatchPlan {
  std::int64_t n1 = 0;  // draws per batch
  std::int64_t n2 = 0;  // number of batches
  std::vector<std::vector<IndexTriple>> batches;
};

inline BatchPlan split_batches(const IidSequence& seq, std::int64_t n1, std::int64_t n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("split_batches: need n1 >= 1 and n2 >= 1");
  if (n1 * n2 > static_cast<std::int64_t>(seq.triples.size()))
    throw std::invalid_argument("split_batches: n1 * n2 exceeds the sequence length");
  BatchPlan plan;
  plan.n1 = n1;
  plan.n2 = n2;
  plan.batches.resize(static_cast<std::size_t>(n2));
  for (std::int64_t k = 0; k < n2; ++k) {
    auto& batch = plan.batches[static_cast<std::size_t>(k)];
    batch.assign(seq.triples.begin() + k * n1, seq.triples.begin() + (k + 1) * n1);
  }
  return plan;
}

// Largest number of observations sharing one fiber, maximized over the
// three fiber directions (mode-j fibers fix the other two indices).
inline std::int64_t fiber_occupancy(const SampleSet& omega) {
  const auto& dims = omega.dims();
  std::array<std::unordered_map<std::int64_t, std::int64_t>, 3> counts;
  for (std::int64_t i = 0; i < omega.n(); ++i) {
    const IndexTriple t = omega.triple(i);
    counts[0][std::int64_t{t.b - 1} * dims[2] + (t.c - 1)] += 1;
    counts[1][std::int64_t{t.a - 1} * dims[2] + (t.c - 1)] += 1;
    counts[2][std::int64_t{t.a - 1} * dims[1] + (t.b - 1)] += 1;
  }
  std::int64_t worst = 0;
  for (const auto& map : counts)
    for (const auto& [fiber, c] : map) worst = std::max(worst, c);
  return worst;
}

// Ceiling of the fiber-count bound max_j d1 d2 d3 / d_j recast per mode:
// the most observations any single fiber could hold.
inline std::int64_t fiber_capacity(const std::array<int, 3>& dims) {
  return std::max({std::int64_t{dims[0]}, std::int64_t{dims[1]}, std::int64_t{dims[2]}});
}

// Smallest integer nu with |A| <= nu |B||C|, |B| <= nu |A||C| and
// |C| <= nu |A||B|; only integer thresholds matter for set sizes.
inline std::int64_t block_aspect(std::int64_t a, std::int64_t b, std::int64_t c) {
  if (a < 1 || b < 1 || c < 1) throw std::invalid_argument("block_aspect: sizes must be positive");
  const auto ceil_div = [](std::int64_t num, std::int64_t den) { return (num + den - 1) / den; };
  return std::max({ceil_div(a, b * c), ceil_div(b, a * c), ceil_div(c, a * b)});
}

}  // namespace tcomp

#endif  // TCOMP_SAMPLING_HPP
