#pragma once

// Gamma-family special functions on the positive half-line.
//
// digamma and polygamma shift the argument upward with the recurrence
// psi_m(x) = psi_m(x + 1) - (-1)^m m! / x^(m+1) and then evaluate the
// asymptotic Bernoulli expansion (terms through B14). The difference
// functions psi_m(a) - psi_m(b) avoid cancellation: integer gaps are summed
// term by term, and close arguments are shifted together so that every term
// of the difference carries the exact gap a - b as a factor.

namespace momentest::specialfn {

/// Order of a polygamma function; 0 is the digamma function.
class PolyOrder {
 public:
  static constexpr unsigned kMax = 16;

  constexpr explicit PolyOrder(unsigned m) : m_(m) {}
  constexpr unsigned value() const noexcept { return m_; }

 private:
  unsigned m_;
};

/// log Gamma(x), x > 0.
double ln_gamma(double x);

/// psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

/// psi_m(x), x > 0. Order 0 returns exactly digamma(x).
double polygamma(PolyOrder order, double x);

inline double trigamma(double x) { return polygamma(PolyOrder{1}, x); }

/// Psi(a, b) = psi(a) - psi(b).
double digamma_diff(double a, double b);

/// Psi_m(a, b) = psi_m(a) - psi_m(b).
double polygamma_diff(PolyOrder order, double a, double b);

}  // namespace momentest::specialfn
