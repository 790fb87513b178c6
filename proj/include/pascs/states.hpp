#pragma once

#include <cmath>
#include <complex>

#include "pascs/errors.hpp"
#include "pascs/specfun.hpp"
#include "pascs/state_spec.hpp"

namespace pascs {

// A = i alpha e^{-i phi/2} / sqrt(sinh 2r), the common Hermite argument of the
// closed forms; principal (nonnegative real) branch of the square root.
struct HermiteArgument {
  Complex value;
  bool regularized = false;
};

inline HermiteArgument hermite_argument(const StateSpec& spec) {
  if (spec.r <= k_epsilon_r)
    throw argument_error("hermite_argument: r below the r->0 threshold; use the limit formulas");
  Complex num = Complex(0.0, 1.0) * spec.alpha * std::exp(Complex(0.0, -spec.phi / 2.0));
  return {num / std::sqrt(std::sinh(2.0 * spec.r)), false};
}

namespace detail {

// N^{-2} for r > eps: (sinh2r/4)^m sum_l (m!)^2 (2 h)^l / (l! ((m-l)!)^2)
// |H_{m-l}(A)|^2 with h = coth r (addition) or tanh r (subtraction).  The two
// closed forms differ only in this hyperbolic factor.
inline double norm_inv_sq_general(Operation op, int m, Complex alpha, double r, double phi) {
  const auto& comb = combinatorics();
  if (m > comb.n_max()) throw bounds_error("normalization: m exceeds n_max");
  double h = (op == Operation::Add) ? 1.0 / std::tanh(r) : std::tanh(r);
  Complex A = Complex(0.0, 1.0) * alpha * std::exp(Complex(0.0, -phi / 2.0)) /
              std::sqrt(std::sinh(2.0 * r));
  auto H = hermite_sequence(m, A);
  NeumaierSum sum;
  double hyp_pow = 1.0;  // (2h)^l
  for (int l = 0; l <= m; ++l) {
    double coeff = CombinatoricCache::to_double(
        BigInt(comb.factorial(m) * comb.factorial(m) /
               (comb.factorial(l) * comb.factorial(m - l) * comb.factorial(m - l))));
    sum.add(coeff * hyp_pow * std::norm(H[m - l]));
    hyp_pow *= 2.0 * h;
  }
  return std::pow(std::sinh(2.0 * r) / 4.0, m) * sum.value();
}

// r = 0 family.  Addition: <alpha| a^m a†^m |alpha> = sum_j j! C(m,j)^2
// |alpha|^{2(m-j)} (operator reordering; equals m! L_m(-|alpha|^2)).
// Subtraction: <alpha| a†^m a^m |alpha> = |alpha|^{2m}.
inline double norm_inv_sq_r0(Operation op, int m, Complex alpha) {
  const auto& comb = combinatorics();
  if (m > comb.n_max()) throw bounds_error("normalization: m exceeds n_max");
  double a2 = std::norm(alpha);
  if (op == Operation::Subtract) return std::pow(a2, m);
  NeumaierSum sum;
  for (int j = 0; j <= m; ++j) {
    double coeff =
        CombinatoricCache::to_double(BigInt(comb.factorial(j) * comb.binomial(m, j) * comb.binomial(m, j)));
    sum.add(coeff * std::pow(a2, m - j));
  }
  return sum.value();
}

inline double norm_inv_sq(Operation op, int m, Complex alpha, double r, double phi) {
  if (r <= k_epsilon_r) return norm_inv_sq_r0(op, m, alpha);
  return norm_inv_sq_general(op, m, alpha, r, phi);
}

}  // namespace detail

// Closed-form normalization constant N+(alpha,z,m) or N-(alpha,z,m).
inline double normalization(const StateSpec& spec) {
  double inv_sq = detail::norm_inv_sq(spec.op, spec.m, spec.alpha, spec.r, spec.phi);
  if (!(inv_sq > 1e-280))
    throw degenerate_state_error("normalization: squared norm vanishes (degenerate subtraction)");
  return 1.0 / std::sqrt(inv_sq);
}

// The special-case reductions (r = 0: Laguerre / plain power; alpha = 0:
// Legendre forms), kept as an independent consistency check of the general
// sums.  For the subtracted vacuum the bracket needs the same -1/2 exponent as
// the added case; without it the expression is N^{-2}, not N.
inline double normalization_reductions(const StateSpec& spec) {
  const auto& comb = combinatorics();
  if (spec.m > comb.n_max()) throw bounds_error("normalization_reductions: m exceeds n_max");
  double m_fact = comb.factorial_d(spec.m);
  if (spec.r <= k_epsilon_r) {
    if (spec.op == Operation::Add)
      return 1.0 / std::sqrt(m_fact * laguerre(spec.m, -std::norm(spec.alpha)));
    double amod = std::abs(spec.alpha);
    if (spec.m >= 1 && amod == 0.0)
      throw degenerate_state_error("normalization_reductions: degenerate subtraction");
    return std::pow(amod, -spec.m);
  }
  if (std::abs(spec.alpha) == 0.0) {
    if (spec.op == Operation::Add) {
      double p = legendre(spec.m, Complex(std::cosh(spec.r), 0.0)).real();
      return 1.0 / std::sqrt(m_fact * std::pow(std::cosh(spec.r), spec.m) * p);
    }
    Complex is = Complex(0.0, 1.0) * std::sinh(spec.r);
    double bracket = (std::pow(-is, spec.m) * legendre(spec.m, is)).real();
    return 1.0 / std::sqrt(m_fact * bracket);
  }
  throw argument_error("normalization_reductions: spec is not in a special-case family");
}

}  // namespace pascs
