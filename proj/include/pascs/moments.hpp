#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "pascs/errors.hpp"
#include "pascs/specfun.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/states.hpp"

namespace pascs {

constexpr int k_default_max_order = 12;

// A closed-form moment together with its cancellation ratio (largest summand
// magnitude over result magnitude).  Ratios above k_cancellation_limit demote
// the precision claim of any report built on this value.
struct MomentValue {
  Complex value;
  double cancellation = 1.0;
};

constexpr double k_cancellation_limit = 1e8;

namespace detail {

inline Complex cpow(Complex z, int k) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// r = 0 family.  Subtraction leaves a coherent state; addition is the
// photon-added coherent state, evaluated by exact operator reordering:
// a^k a†^l = sum_j j! C(k,j) C(l,j) a†^{l-j} a^{k-j}.
inline MomentValue moment_r0(const StateSpec& spec, int p, int q) {
  if (spec.op == Operation::Subtract)
    return {cpow(std::conj(spec.alpha), p) * cpow(spec.alpha, q), 1.0};
  const auto& comb = combinatorics();
  const int m = spec.m;
  Complex ac = std::conj(spec.alpha);
  NeumaierSumC sum;
  double max_term = 0.0;
  for (int j = 0; j <= std::min(m, p); ++j) {
    for (int i = 0; i <= std::min(q, m); ++i) {
      for (int s = 0; s <= std::min(m - j, m - i); ++s) {
        BigInt big = comb.factorial(j) * comb.binomial(m, j) * comb.binomial(p, j) *
                     comb.factorial(i) * comb.binomial(q, i) * comb.binomial(m, i) *
                     comb.factorial(s) * comb.binomial(m - j, s) * comb.binomial(m - i, s);
        Complex term = CombinatoricCache::to_double(big) * cpow(ac, p - j + m - i - s) *
                       cpow(spec.alpha, q - i + m - j - s);
        max_term = std::max(max_term, std::abs(term));
        sum.add(term);
      }
    }
  }
  Complex raw = sum.value();
  double inv = norm_inv_sq_r0(Operation::Add, m, spec.alpha);
  Complex value = raw / inv;
  double cancel = max_term / std::max(std::abs(raw), 1e-300);
  return {value, cancel};
}

}  // namespace detail

// Closed-form <a†^p a^q>.  Relative to the raw product form, the adjudicated
// convention is: phase e^{-i phi (p-q)/2}, factor i^p (-i)^q, and the Hermite
// factor attached to the p-bearing index evaluated at A* (the q-bearing one
// at A); this is the unique convention consistent with the Fock oracle and
// with Hermitian symmetry <a†^p a^q> = conj(<a†^q a^p>).
inline MomentValue moment_detail(const StateSpec& spec, int p, int q,
                                 int max_order = k_default_max_order) {
  if (p < 0 || q < 0 || p > max_order || q > max_order)
    throw bounds_error("moment: order (" + std::to_string(p) + "," + std::to_string(q) +
                       ") exceeds max_order " + std::to_string(max_order));
  spec.require_nondegenerate();
  if (p == 0 && q == 0) return {Complex(1.0, 0.0), 1.0};
  if (spec.r <= k_epsilon_r) return detail::moment_r0(spec, p, q);

  const auto& comb = combinatorics();
  const int m = spec.m;
  const double sh = std::sinh(2.0 * spec.r);
  const Complex A = hermite_argument(spec).value;
  const Complex Ac = std::conj(A);
  const auto Hp = hermite_sequence(m + p, Ac);
  const auto Hq = hermite_sequence(m + q, A);
  const Complex phase =
      std::exp(Complex(0.0, -spec.phi * (p - q) / 2.0)) * detail::i_pow_p_mi_pow_q(p, q);
  const double n_sq = 1.0 / detail::norm_inv_sq_general(spec.op, m, spec.alpha, spec.r, spec.phi);

  detail::NeumaierSumC outer;
  double max_term = 0.0;
  if (spec.op == Operation::Add) {
    const double two_coth = 2.0 / std::tanh(spec.r);
    for (int j = 0; j <= std::min(p, q); ++j) {
      double cj = CombinatoricCache::to_double(
          BigInt(comb.factorial(p) * comb.factorial(q) /
                 (comb.factorial(j) * comb.factorial(p - j) * comb.factorial(q - j))));
      if (j % 2 == 1) cj = -cj;
      double pref = std::pow(sh / 4.0, m - j + 0.5 * (p + q));
      detail::NeumaierSumC inner;
      double hyp = 1.0;
      for (int l = 0; l <= m - j + std::min(p, q); ++l) {
        double ff = comb.falling_factorial_d(m + p - j, l) * comb.falling_factorial_d(m + q - j, l);
        inner.add(hyp / comb.factorial_d(l) * ff * Hp[m + p - j - l] * Hq[m + q - j - l]);
        hyp *= two_coth;
      }
      Complex term = cj * pref * inner.value();
      max_term = std::max(max_term, std::abs(term));
      outer.add(term);
    }
  } else {
    const double two_tanh = 2.0 * std::tanh(spec.r);
    const double pref = std::pow(sh / 4.0, m + 0.5 * (p + q));
    double hyp = 1.0;
    for (int l = 0; l <= m + std::min(p, q); ++l) {
      double ff = comb.falling_factorial_d(m + p, l) * comb.falling_factorial_d(m + q, l);
      Complex term = pref * hyp / comb.factorial_d(l) * ff * Hp[m + p - l] * Hq[m + q - l];
      max_term = std::max(max_term, std::abs(term));
      outer.add(term);
      hyp *= two_tanh;
    }
  }
  Complex raw = outer.value();
  Complex value = n_sq * phase * raw;
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw convergence_error("moment: floating-point range exceeded for these orders");
  double cancel = max_term / std::max(std::abs(raw), 1e-300);
  return {value, cancel};
}

inline Complex moment(const StateSpec& spec, int p, int q,
                      int max_order = k_default_max_order) {
  return moment_detail(spec, p, q, max_order).value;
}

// Real-valued <a†^p a^p> through the simplified diagonal forms: a ratio of
// normalization sums (subtraction) or an alternating sum of them (addition).
inline double diagonal_moment(const StateSpec& spec, int p,
                              int max_order = k_default_max_order) {
  if (p < 0 || p > max_order)
    throw bounds_error("diagonal_moment: order exceeds max_order");
  spec.require_nondegenerate();
  if (p == 0) return 1.0;
  if (spec.r <= k_epsilon_r) {
    if (spec.op == Operation::Subtract) return std::pow(std::norm(spec.alpha), p);
    return detail::moment_r0(spec, p, p).value.real();
  }
  const auto& comb = combinatorics();
  auto inv_sq = [&](int k) {
    return detail::norm_inv_sq_general(spec.op, k, spec.alpha, spec.r, spec.phi);
  };
  if (spec.op == Operation::Subtract) return inv_sq(spec.m + p) / inv_sq(spec.m);
  detail::NeumaierSum sum;
  for (int j = 0; j <= p; ++j) {
    double cj = CombinatoricCache::to_double(
        BigInt(comb.factorial(p) * comb.factorial(p) /
               (comb.factorial(j) * comb.factorial(p - j) * comb.factorial(p - j))));
    if (j % 2 == 1) cj = -cj;
    sum.add(cj * inv_sq(spec.m - j + p));
  }
  return sum.value() / inv_sq(spec.m);
}

// Memoized <a†^p a^q> table for one spec.  Lazy population; insertion is
// lock-protected so concurrent readers see no torn values.
class MomentTable {
 public:
  explicit MomentTable(StateSpec spec, int max_order = k_default_max_order)
      : spec_(std::move(spec)), max_order_(max_order) {
    spec_.require_nondegenerate();
  }

  const StateSpec& spec() const { return spec_; }
  int max_order() const { return max_order_; }

  Complex at(int p, int q) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(p, q);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, moment_detail(spec_, p, q, max_order_)).first;
    return it->second.value;
  }

  double diag(int p) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = diag_cache_.find(p);
    if (it == diag_cache_.end())
      it = diag_cache_.emplace(p, diagonal_moment(spec_, p, max_order_)).first;
    return it->second;
  }

  // Worst cancellation ratio seen across the populated entries.
  double worst_cancellation() const {
    std::lock_guard<std::mutex> lock(mu_);
    double w = 1.0;
    for (const auto& [k, v] : cache_) w = std::max(w, v.cancellation);
    return w;
  }

  bool precision_demoted() const { return worst_cancellation() > k_cancellation_limit; }

 private:
  StateSpec spec_;
  int max_order_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, MomentValue> cache_;
  mutable std::map<int, double> diag_cache_;
};

}  // namespace pascs
