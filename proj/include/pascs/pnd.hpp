#pragma once

#include <cmath>
#include <vector>

#include "pascs/errors.hpp"
#include "pascs/specfun.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/states.hpp"

namespace pascs {

// beta = alpha cosh r - alpha* e^{i phi} sinh r: the displacement seen after
// commuting D(alpha) through S(z); shared between the distribution and the
// Wigner factorization.
inline Complex beta_parameter(const StateSpec& spec) {
  return spec.alpha * std::cosh(spec.r) -
         std::conj(spec.alpha) * std::exp(Complex(0.0, spec.phi)) * std::sinh(spec.r);
}

struct PhotonNumberDistribution {
  StateSpec spec;
  std::vector<double> probabilities;  // index n = 0..n_report
  double tail_mass = 0.0;

  int n_report() const { return static_cast<int>(probabilities.size()) - 1; }
};

namespace detail {

inline double fact_prod(int n) {
  double v = 1.0;
  for (int j = 2; j <= n; ++j) v *= j;
  return v;
}

// Case r ~ 0.  Addition: P_n = N+^2 n!/((n-m)!)^2 e^{-|a|^2} |a|^{2(n-m)};
// subtraction leaves the coherent Poisson distribution.
inline double pn_r0(const StateSpec& spec, int n) {
  double a2 = std::norm(spec.alpha);
  if (spec.op == Operation::Subtract) {
    double v = std::exp(-a2);
    for (int j = 1; j <= n; ++j) v *= a2 / j;
    return v;
  }
  if (n < spec.m) return 0.0;
  int k = n - spec.m;
  double pois = std::exp(-a2);  // e^{-a2} a2^k / k!
  for (int j = 1; j <= k; ++j) pois *= a2 / j;
  double nfac_ratio = 1.0;  // n!/(n-m)!
  for (int j = k + 1; j <= n; ++j) nfac_ratio *= j;
  double n_sq = 1.0 / norm_inv_sq_r0(Operation::Add, spec.m, spec.alpha);
  return n_sq * nfac_ratio * pois;
}

// Scaled Hermite sequence u_k = t^{k/2} H_k(g) / sqrt(k!): the distribution
// weights (tanh r / 2)^k |H_k(g)|^2 / k! are |u_k|^2, which stays bounded
// uniformly in k, so P_n can be evaluated to any order without overflow.
inline std::vector<Complex> scaled_hermite_sequence(int n, Complex g, double t) {
  std::vector<Complex> u(n + 1);
  const double s = std::sqrt(t);
  u[0] = Complex(1.0, 0.0);
  if (n >= 1) u[1] = 2.0 * g * s;
  for (int k = 1; k < n; ++k)
    u[k + 1] =
        (2.0 * g * s * u[k] - 2.0 * std::sqrt(static_cast<double>(k)) * t * u[k - 1]) /
        std::sqrt(k + 1.0);
  return u;
}

// Hermite-index convention for the subtracted state.  Direct Fock expansion
// (a^m maps amplitude c_{n+m} down to n) gives index and exponent n+m; the
// n-m variant is kept only so the verifier can demonstrate its rejection.
enum class SubtractIndexConvention { NPlusM, NMinusM };

inline double pn_general(const StateSpec& spec, int n,
                         SubtractIndexConvention conv = SubtractIndexConvention::NPlusM) {
  const Complex beta = beta_parameter(spec);
  const double th = std::tanh(spec.r);
  const Complex g = Complex(0.0, -1.0) * beta * std::exp(Complex(0.0, -spec.phi / 2.0)) /
                    std::sqrt(std::sinh(2.0 * spec.r));
  const double envelope =
      std::exp(-std::norm(beta) - (std::exp(Complex(0.0, -spec.phi)) * beta * beta).real() * th) /
      std::cosh(spec.r);
  if (spec.op == Operation::Add) {
    if (n < spec.m) return 0.0;
    int k = n - spec.m;
    double n_sq = 1.0 / norm_inv_sq_general(spec.op, spec.m, spec.alpha, spec.r, spec.phi);
    double nfac_ratio = 1.0;  // n!/(n-m)!
    for (int j = k + 1; j <= n; ++j) nfac_ratio *= j;
    double hk = std::norm(hermite(k, g));
    return n_sq * nfac_ratio / fact_prod(k) * envelope * std::pow(th / 2.0, k) * hk;
  }
  int k = (conv == SubtractIndexConvention::NPlusM) ? n + spec.m : n - spec.m;
  if (k < 0) return 0.0;
  double n_sq = 1.0 / norm_inv_sq_general(spec.op, spec.m, spec.alpha, spec.r, spec.phi);
  double hk = std::norm(hermite(k, g));
  return n_sq / fact_prod(n) * envelope * std::pow(th / 2.0, k) * hk;
}

}  // namespace detail

// Closed-form P_n for n = 0..n_max.  Hole burning is structural: for the
// added state the first m entries are exactly zero.
inline PhotonNumberDistribution pnd(const StateSpec& spec, int n_max) {
  spec.require_nondegenerate();
  if (n_max < 0) throw argument_error("pnd: n_max must be nonnegative");
  PhotonNumberDistribution dist{spec, std::vector<double>(n_max + 1, 0.0), 0.0};
  detail::NeumaierSum total;
  if (spec.r <= k_epsilon_r) {
    for (int n = 0; n <= n_max; ++n) {
      dist.probabilities[n] = detail::pn_r0(spec, n);
      total.add(dist.probabilities[n]);
    }
    dist.tail_mass = 1.0 - total.value();
    return dist;
  }
  const Complex beta = beta_parameter(spec);
  const double th = std::tanh(spec.r);
  const Complex g = Complex(0.0, -1.0) * beta * std::exp(Complex(0.0, -spec.phi / 2.0)) /
                    std::sqrt(std::sinh(2.0 * spec.r));
  const double envelope =
      std::exp(-std::norm(beta) - (std::exp(Complex(0.0, -spec.phi)) * beta * beta).real() * th) /
      std::cosh(spec.r);
  const double n_sq =
      1.0 / detail::norm_inv_sq_general(spec.op, spec.m, spec.alpha, spec.r, spec.phi);
  const int top = (spec.op == Operation::Add) ? n_max - spec.m : n_max + spec.m;
  const auto u = detail::scaled_hermite_sequence(std::max(top, 0), g, th / 2.0);
  for (int n = 0; n <= n_max; ++n) {
    double pn = 0.0;
    if (spec.op == Operation::Add) {
      if (n >= spec.m) {
        double ratio = 1.0;  // n!/(n-m)!
        for (int j = n - spec.m + 1; j <= n; ++j) ratio *= j;
        pn = n_sq * envelope * ratio * std::norm(u[n - spec.m]);
      }
    } else {
      double ratio = 1.0;  // (n+m)!/n!
      for (int j = n + 1; j <= n + spec.m; ++j) ratio *= j;
      pn = n_sq * envelope * ratio * std::norm(u[n + spec.m]);
    }
    dist.probabilities[n] = pn;
    total.add(pn);
  }
  dist.tail_mass = 1.0 - total.value();
  return dist;
}

// Klyshko criterion from three consecutive probabilities:
// B(n) = (n+2) P_n P_{n+2} - (n+1) P_{n+1}^2; negative values are
// nonclassical.  The middle term uses P_{n+1} (squaring P_n instead breaks
// the Poisson zero identity the criterion is normalized against).
inline double klyshko(const PhotonNumberDistribution& dist, int n) {
  if (n < 0 || n + 2 > dist.n_report())
    throw bounds_error("klyshko: need P_n..P_{n+2} inside the reported range");
  const auto& P = dist.probabilities;
  return (n + 2) * P[n] * P[n + 2] - (n + 1) * P[n + 1] * P[n + 1];
}

// Single-photon-source quality eta = P_1 / (1 - P_0 - P_1).
inline double eta(const PhotonNumberDistribution& dist) {
  if (dist.n_report() < 1) throw bounds_error("eta: distribution must report P_0 and P_1");
  double denom = 1.0 - dist.probabilities[0] - dist.probabilities[1];
  if (denom <= 1e-15)
    throw undefined_witness_error("eta: state is supported on {0,1} photons");
  return dist.probabilities[1] / denom;
}

}  // namespace pascs
