#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pascs/errors.hpp"
#include "pascs/moments.hpp"
#include "pascs/specfun.hpp"

namespace pascs {

// Values inside this band are reported as a zero crossing: neither classical
// nor nonclassical is flagged (keeps coherent-state boundaries quiet).
constexpr double k_zero_band = 1e-12;

inline bool nonclassical_flag(double value) { return value < -k_zero_band; }

// Mandel Q = <a†^2 a^2>/<a†a> - <a†a>.
inline double mandel_q(const MomentTable& table) {
  double n1 = table.diag(1);
  if (!(n1 > 0.0))
    throw undefined_witness_error("mandel_q: zero mean photon number");
  return table.diag(2) / n1 - n1;
}

// Higher-order antibunching D(n-1) = <a†^n a^n> - <a†a>^n.
inline double hoa(const MomentTable& table, int n) {
  if (n < 2) throw argument_error("hoa: order n must be >= 2");
  if (n > table.max_order()) throw bounds_error("hoa: order exceeds max_order");
  return table.diag(n) - std::pow(table.diag(1), n);
}

// Higher-order sub-Poissonian statistic d(n-1): Stirling-number weighted
// combination of diagonal moments against powers of the mean.
inline double hosps(const MomentTable& table, int n) {
  if (n < 2) throw argument_error("hosps: order n must be >= 2");
  if (n > table.max_order()) throw bounds_error("hosps: order exceeds max_order");
  const auto& comb = combinatorics();
  const double nbar = table.diag(1);
  detail::NeumaierSum sum;
  for (int r = 0; r <= n; ++r) {
    for (int k = 1; k <= r; ++k) {
      double c = CombinatoricCache::to_double(BigInt(comb.stirling2(r, k) * comb.binomial(n, r)));
      if (r % 2 == 1) c = -c;
      sum.add(c * (table.diag(k) * std::pow(nbar, n - r) - std::pow(nbar, k + n - r)));
    }
  }
  return sum.value();
}

namespace detail {

inline double det3(const std::array<double, 5>& v) {
  // symmetric Hankel [[v0 v1 v2],[v1 v2 v3],[v2 v3 v4]]
  return v[0] * (v[2] * v[4] - v[3] * v[3]) - v[1] * (v[1] * v[4] - v[3] * v[2]) +
         v[2] * (v[1] * v[3] - v[2] * v[2]);
}

}  // namespace detail

// Agarwal A3 = det m(3) / (det mu(3) - det m(3)) with m_k = <a†^k a^k> and
// mu_k = <(a†a)^k>; mu is obtained from m by the exact Stirling conversion
// <(a†a)^k> = sum_j S2(k,j) <a†^j a^j>.
inline double agarwal_a3(const MomentTable& table) {
  if (table.max_order() < 4) throw bounds_error("agarwal_a3: needs moments up to order 4");
  const auto& comb = combinatorics();
  std::array<double, 5> mk{1.0, 0.0, 0.0, 0.0, 0.0};
  std::array<double, 5> mu{1.0, 0.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 4; ++k) {
    mk[k] = table.diag(k);
    detail::NeumaierSum s;
    for (int j = 1; j <= k; ++j) s.add(comb.stirling2_d(k, j) * mk[j]);
    mu[k] = s.value();
  }
  double dm = detail::det3(mk);
  double dmu = detail::det3(mu);
  double denom = dmu - dm;
  double scale = std::max(std::abs(dm) + std::abs(dmu), 1e-30);
  if (std::abs(denom) <= 1e-12 * scale)
    throw undefined_witness_error("agarwal_a3: vanishing denominator (det m = " +
                                  format_double(dm) + ", det mu = " + format_double(dmu) + ")");
  return dm / denom;
}

namespace detail {

// <(dX)^n> for X = (a + a†)/sqrt(2): pair-contraction expansion of the
// centered binomial into normally ordered moments, weight (2i-1)!! per
// contracted pair.
inline double central_quadrature_moment(const MomentTable& table, int n) {
  const auto& comb = combinatorics();
  Complex a_mean = table.at(0, 1) + table.at(1, 0);
  double s_mean = a_mean.real();  // <a + a†> is real by Hermitian symmetry
  NeumaierSumC sum;
  const double half_pow = std::pow(0.5, 0.5 * n);
  for (int r = 0; r <= n; ++r) {
    double sign = (r % 2 == 1) ? -1.0 : 1.0;
    for (int i = 0; 2 * i <= r; ++i) {
      double w = double_factorial_odd(i);
      for (int k = 0; k <= r - 2 * i; ++k) {
        double c = CombinatoricCache::to_double(
            BigInt(comb.binomial(r - 2 * i, k) * comb.binomial(n, r) * comb.binomial(r, 2 * i)));
        sum.add(sign * half_pow * w * c * std::pow(s_mean, n - r) * table.at(k, r - 2 * i - k));
      }
    }
  }
  return sum.value().real();
}

}  // namespace detail

// Hong-Mandel higher-order squeezing S(n) = <(dX)^n>/(1/2)_{n/2} - 1 for even
// n; negative values witness nonclassicality.
inline double hong_mandel(const StateSpec& spec, const MomentTable& table, int n) {
  (void)spec;
  if (n < 2 || n % 2 != 0) throw argument_error("hong_mandel: order must be even and >= 2");
  if (n > 8) throw bounds_error("hong_mandel: order must be <= 8");
  if (n > table.max_order()) throw bounds_error("hong_mandel: order exceeds table max_order");
  double dxn = detail::central_quadrature_moment(table, n);
  return dxn / pochhammer_half(n / 2) - 1.0;
}

// All scalar criteria for one state.  Undefined entries (vacuum Mandel Q,
// vanishing A3 denominator) are stored as NaN and never flagged.
struct WitnessReport {
  StateSpec spec;
  double q_mandel = std::numeric_limits<double>::quiet_NaN();
  std::map<int, double> D;  // keyed by n; value D(n-1)
  std::map<int, double> d;  // keyed by n; value d(n-1)
  double a3 = std::numeric_limits<double>::quiet_NaN();
  std::map<int, double> S;  // keyed by even n
  std::map<std::string, bool> flags;
  bool precision_demoted = false;
};

inline WitnessReport witness_report(const StateSpec& spec, int n_max = 5,
                                    std::vector<int> squeeze_orders = {2, 4, 6}) {
  spec.require_nondegenerate();
  MomentTable table(spec);
  WitnessReport rep;
  rep.spec = spec;
  try {
    rep.q_mandel = mandel_q(table);
    rep.flags["Q"] = nonclassical_flag(rep.q_mandel);
  } catch (const undefined_witness_error&) {
  }
  for (int n = 2; n <= n_max; ++n) {
    rep.D[n] = hoa(table, n);
    rep.flags["D" + std::to_string(n - 1)] = nonclassical_flag(rep.D[n]);
    rep.d[n] = hosps(table, n);
    rep.flags["d" + std::to_string(n - 1)] = nonclassical_flag(rep.d[n]);
  }
  try {
    rep.a3 = agarwal_a3(table);
    rep.flags["A3"] = nonclassical_flag(rep.a3);
  } catch (const undefined_witness_error&) {
  }
  for (int n : squeeze_orders) {
    rep.S[n] = hong_mandel(spec, table, n);
    rep.flags["S" + std::to_string(n)] = nonclassical_flag(rep.S[n]);
  }
  rep.precision_demoted = table.precision_demoted();
  return rep;
}

}  // namespace pascs
