#ifndef TCOMP_STATS_HPP
#define TCOMP_STATS_HPP

// Chi-square tail probabilities for the sampler uniformity checks.
// P{chi2_df >= x} = Q(df/2, x/2), the regularized upper incomplete gamma
// function, computed by the usual series / continued-fraction split.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace tcomp {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by power series; converges
// quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction; converges quickly for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Q(a, x) = 1 - P(a, x), the regularized upper incomplete gamma function.
inline double gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution with df degrees of freedom.
inline double chi2_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_sf: df must be >= 1");
  if (x <= 0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

// Pearson chi-square statistic for observed counts against equal expected
// counts; pairs with chi2_sf(stat, bins - 1).
template <typename Container>
double chi2_uniform_stat(const Container& counts) {
  std::int64_t total = 0;
  int bins = 0;
  for (const auto c : counts) {
    if (c < 0) throw std::invalid_argument("chi2_uniform_stat: negative count");
    total += static_cast<std::int64_t>(c);
    ++bins;
  }
  if (bins < 2) throw std::invalid_argument("chi2_uniform_stat: need at least two bins");
  if (total == 0) throw std::invalid_argument("chi2_uniform_stat: empty sample");
  const double expected = static_cast<double>(total) / bins;
  double stat = 0.0;
  for (const auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

}  // namespace tcomp

#endif  // TCOMP_STATS_HPP
