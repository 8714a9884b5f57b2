#include "momentest/specialfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <math.h>

#include "momentest/error.hpp"

namespace momentest::specialfn {
namespace {

// B2, B4, ..., B14.
constexpr std::array<double, 7> kBernoulli = {
    1.0 / 6.0,   -1.0 / 30.0,       1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0,   7.0 / 6.0,
};

constexpr double kDigammaShift = 8.0;

void check_argument(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

void check_order(PolyOrder order) {
  if (order.value() > PolyOrder::kMax) {
    throw DomainError("polygamma: order " + std::to_string(order.value()) +
                      " exceeds supported maximum " + std::to_string(PolyOrder::kMax));
  }
}

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

// Shift threshold for order m; higher orders need a larger argument for the
// truncated expansion to stay below one ulp.
double shift_threshold(unsigned m) { return kDigammaShift + 2.0 * m; }

// Coefficient of x^-(2k+m) in the psi_m expansion, without the overall sign:
// B_2k (2k+m-1)! / (2k)!.
double expansion_coefficient(std::size_t k, unsigned m) {
  const double two_k = 2.0 * static_cast<double>(k + 1);
  double c = kBernoulli[k];
  for (unsigned j = 1; j < m; ++j) c *= two_k + j;
  return c;
}

double digamma_asymptotic(double x) {
  const double t = 1.0 / (x * x);
  double series = 0.0;
  for (std::size_t k = kBernoulli.size(); k-- > 0;) {
    series = series * t + kBernoulli[k] / (2.0 * static_cast<double>(k + 1));
  }
  series *= t;
  return std::log(x) - 0.5 / x - series;
}

// psi_m(x) for m >= 1 and x above the shift threshold.
double polygamma_asymptotic(unsigned m, double x) {
  const double inv = 1.0 / x;
  const double t = inv * inv;
  double series = 0.0;
  for (std::size_t k = kBernoulli.size(); k-- > 0;) {
    series = series * t + expansion_coefficient(k, m);
  }
  series *= t;
  const double bracket = factorial(m - 1) + factorial(m) * 0.5 * inv + series;
  const double magnitude = bracket * std::pow(inv, static_cast<double>(m));
  return (m % 2 == 1) ? magnitude : -magnitude;
}

// a^-p - b^-p given the exact gap d = a - b.
double inverse_power_diff(double a, double b, double d, unsigned p) {
  const double ia = 1.0 / a;
  const double ib = 1.0 / b;
  // sum_{j=0}^{p-1} a^-(p-j) b^-(j+1)
  double sum = 0.0;
  double term = std::pow(ia, static_cast<double>(p)) * ib;
  const double ratio = a * ib;  // (1/b)/(1/a)
  for (unsigned j = 0; j < p; ++j) {
    sum += term;
    term *= ratio;
  }
  return -d * sum;
}

double sign_of_shift(unsigned m) { return (m % 2 == 0) ? 1.0 : -1.0; }

bool is_small_integer_gap(double d) {
  return std::abs(d) <= 64.0 && d == std::nearbyint(d);
}

// psi_m(lo + n) - psi_m(lo) = sum_{i<n} (-1)^m m! / (lo + i)^(m+1).
double integer_gap_sum(unsigned m, double lo, int n) {
  double sum = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    sum += std::pow(lo + i, -static_cast<double>(m + 1));
  }
  return sign_of_shift(m) * factorial(m) * sum;
}

double close_digamma_diff(double a, double b, double d) {
  double shift_sum = 0.0;
  double ap = a;
  double bp = b;
  while (std::min(ap, bp) < kDigammaShift) {
    shift_sum += 1.0 / (ap * bp);
    ap += 1.0;
    bp += 1.0;
  }
  double series = 0.0;
  for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
    const unsigned p = 2 * static_cast<unsigned>(k + 1);
    series += kBernoulli[k] / p * inverse_power_diff(ap, bp, d, p);
  }
  const double asym = std::log1p(d / bp) + 0.5 * d / (ap * bp) - series;
  return asym + d * shift_sum;
}

double close_polygamma_diff(unsigned m, double a, double b, double d) {
  const double threshold = shift_threshold(m);
  double shift_sum = 0.0;
  double ap = a;
  double bp = b;
  while (std::min(ap, bp) < threshold) {
    shift_sum += inverse_power_diff(ap, bp, d, m + 1);
    ap += 1.0;
    bp += 1.0;
  }
  double series = factorial(m - 1) * inverse_power_diff(ap, bp, d, m) +
                  0.5 * factorial(m) * inverse_power_diff(ap, bp, d, m + 1);
  for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
    const unsigned p = 2 * static_cast<unsigned>(k + 1) + m;
    series += expansion_coefficient(k, m) * inverse_power_diff(ap, bp, d, p);
  }
  const double asym = (m % 2 == 1) ? series : -series;
  return asym - sign_of_shift(m) * factorial(m) * shift_sum;
}

}  // namespace

double ln_gamma(double x) {
  check_argument(x, "ln_gamma");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double digamma(double x) {
  check_argument(x, "digamma");
  double shift = 0.0;
  while (x < kDigammaShift) {
    shift += 1.0 / x;
    x += 1.0;
  }
  return digamma_asymptotic(x) - shift;
}

double polygamma(PolyOrder order, double x) {
  check_order(order);
  const unsigned m = order.value();
  if (m == 0) return digamma(x);
  check_argument(x, "polygamma");
  const double threshold = shift_threshold(m);
  double shift = 0.0;
  while (x < threshold) {
    shift += std::pow(x, -static_cast<double>(m + 1));
    x += 1.0;
  }
  return polygamma_asymptotic(m, x) - sign_of_shift(m) * factorial(m) * shift;
}

double digamma_diff(double a, double b) {
  return polygamma_diff(PolyOrder{0}, a, b);
}

double polygamma_diff(PolyOrder order, double a, double b) {
  check_order(order);
  check_argument(a, "polygamma_diff");
  check_argument(b, "polygamma_diff");
  const unsigned m = order.value();
  if (a == b) return 0.0;
  const double d = a - b;
  if (is_small_integer_gap(d)) {
    const int n = static_cast<int>(std::abs(d));
    const double lo = std::min(a, b);
    const double gap = integer_gap_sum(m, lo, n);
    return d > 0.0 ? gap : -gap;
  }
  // Sterbenz: d is exact whenever a/b lies in [1/2, 2].
  if (std::abs(d) > 0.5 * std::max(a, b)) {
    return polygamma(order, a) - polygamma(order, b);
  }
  return m == 0 ? close_digamma_diff(a, b, d) : close_polygamma_diff(m, a, b, d);
}

}  // namespace momentest::specialfn
