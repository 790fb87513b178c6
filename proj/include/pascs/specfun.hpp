#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pascs/errors.hpp"

namespace pascs {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;

// Exact-integer combinatorics: factorials, binomials (Pascal) and Stirling
// numbers of the second kind up to a configured n_max.  Built once, read-only
// afterwards; safe for unrestricted concurrent use.  Products of factorial
// ratios are reduced as exact integers before conversion to double so the
// closed-form sums see exactly representable coefficients wherever possible.
class CombinatoricCache {
 public:
  explicit CombinatoricCache(int n_max = 64) : n_max_(n_max) {
    if (n_max < 0) throw argument_error("CombinatoricCache: n_max must be nonnegative");
    fact_.resize(n_max_ + 1);
    fact_[0] = 1;
    for (int n = 1; n <= n_max_; ++n) fact_[n] = fact_[n - 1] * n;

    binom_.resize(n_max_ + 1);
    for (int n = 0; n <= n_max_; ++n) {
      binom_[n].assign(n + 1, BigInt(1));
      for (int k = 1; k < n; ++k) binom_[n][k] = binom_[n - 1][k - 1] + binom_[n - 1][k];
    }

    // S2(r,0) = 0 for r>=1, S2(0,0) = 1, S2(r,k) = k S2(r-1,k) + S2(r-1,k-1)
    s2_.resize(n_max_ + 1);
    s2_[0].assign(1, BigInt(1));
    for (int r = 1; r <= n_max_; ++r) {
      s2_[r].assign(r + 1, BigInt(0));
      for (int k = 1; k <= r; ++k) {
        BigInt same_k = (k <= r - 1) ? s2_[r - 1][k] : BigInt(0);
        s2_[r][k] = k * same_k + s2_[r - 1][k - 1];
      }
    }
  }

  int n_max() const { return n_max_; }

  const BigInt& factorial(int n) const {
    check(n, "factorial");
    return fact_[n];
  }

  BigInt binomial(int n, int k) const {
    check(n, "binomial");
    if (k < 0 || k > n) return BigInt(0);
    return binom_[n][k];
  }

  const BigInt& stirling2(int r, int k) const {
    check(r, "stirling2");
    if (k < 0 || k > r) throw bounds_error("stirling2: require 0 <= k <= r");
    return s2_[r][k];
  }

  double factorial_d(int n) const { return to_double(factorial(n)); }
  double binomial_d(int n, int k) const { return to_double(binomial(n, k)); }
  double stirling2_d(int r, int k) const { return to_double(stirling2(r, k)); }

  // n! / (n-l)! as an exact integer, converted once.
  double falling_factorial_d(int n, int l) const {
    check(n, "falling_factorial");
    if (l < 0 || l > n) return 0.0;
    return to_double(BigInt(fact_[n] / fact_[n - l]));
  }

  static double to_double(const BigInt& v) { return v.convert_to<double>(); }

 private:
  void check(int n, const char* who) const {
    if (n < 0 || n > n_max_)
      throw bounds_error(std::string(who) + ": order " + std::to_string(n) +
                         " outside [0, " + std::to_string(n_max_) + "]");
  }

  int n_max_;
  std::vector<BigInt> fact_;
  std::vector<std::vector<BigInt>> binom_;
  std::vector<std::vector<BigInt>> s2_;
};

// Process-wide cache with the default bound.
inline const CombinatoricCache& combinatorics() {
  static const CombinatoricCache cache(64);
  return cache;
}

namespace detail {
inline void check_order(int n, const char* who) {
  if (n < 0 || n > combinatorics().n_max())
    throw bounds_error(std::string(who) + ": order " + std::to_string(n) +
                       " exceeds n_max " + std::to_string(combinatorics().n_max()));
}
}  // namespace detail

// Physicists' Hermite polynomial H_n(z), complex argument, by the three-term
// recurrence H_{n+1} = 2 z H_n - 2 n H_{n-1}.
inline Complex hermite(int n, Complex z) {
  detail::check_order(n, "hermite");
  Complex h0(1.0, 0.0);
  if (n == 0) return h0;
  Complex h1 = 2.0 * z;
  for (int k = 1; k < n; ++k) {
    Complex next = 2.0 * z * h1 - 2.0 * static_cast<double>(k) * h0;
    h0 = h1;
    h1 = next;
  }
  return h1;
}

// H_0..H_n at a fixed argument in one recurrence pass.
inline std::vector<Complex> hermite_sequence(int n, Complex z) {
  detail::check_order(n, "hermite_sequence");
  std::vector<Complex> h(n + 1);
  h[0] = Complex(1.0, 0.0);
  if (n >= 1) h[1] = 2.0 * z;
  for (int k = 1; k < n; ++k) h[k + 1] = 2.0 * z * h[k] - 2.0 * static_cast<double>(k) * h[k - 1];
  return h;
}

// Laguerre polynomial L_m(x) by the standard recurrence.
inline double laguerre(int m, double x) {
  detail::check_order(m, "laguerre");
  double p0 = 1.0;
  if (m == 0) return p0;
  double p1 = 1.0 - x;
  for (int k = 1; k < m; ++k) {
    double next = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = next;
  }
  return p1;
}

// Legendre polynomial P_m(z), complex argument allowed (Bonnet recurrence).
inline Complex legendre(int m, Complex z) {
  detail::check_order(m, "legendre");
  Complex p0(1.0, 0.0);
  if (m == 0) return p0;
  Complex p1 = z;
  for (int k = 1; k < m; ++k) {
    Complex next = ((2.0 * k + 1.0) * z * p1 - static_cast<double>(k) * p0) / (k + 1.0);
    p0 = p1;
    p1 = next;
  }
  return p1;
}

// (1/2)_k = prod_{j=0}^{k-1} (1/2 + j), the rising factorial at one half.
inline double pochhammer_half(int k) {
  double v = 1.0;
  for (int j = 0; j < k; ++j) v *= 0.5 + j;
  return v;
}

inline const BigInt& stirling2(int r, int k) { return combinatorics().stirling2(r, k); }

// (2i)!/(2^i i!) = (2i-1)!!, the pair-contraction weight of (a + a†)^n.
inline double double_factorial_odd(int i) {
  double v = 1.0;
  for (int j = 1; j <= i; ++j) v *= 2.0 * j - 1.0;
  return v;
}

namespace detail {

// Neumaier compensated accumulation; keeps alternating closed-form sums at
// machine precision and makes reduction order effects negligible.
class NeumaierSum {
 public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

class NeumaierSumC {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  NeumaierSum re_, im_;
};

// i^p (-i)^q without trig.
inline Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline Complex i_pow_p_mi_pow_q(int p, int q) { return ipow(p) * ipow(-q); }

}  // namespace detail

}  // namespace pascs
