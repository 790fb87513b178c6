#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pascs/errors.hpp"
#include "pascs/state_spec.hpp"

// Independent brute-force reference: states are built numerically in a
// truncated Fock basis from operator exponentials, and every observable is
// obtained by direct linear algebra.  Nothing here touches the closed forms
// (no Hermite/Laguerre/Legendre evaluation, no normalization sums), so a
// match between the two routes is meaningful.

namespace pascs::oracle {

struct FockVector {
  std::vector<Complex> amplitudes;  // indexed by photon number 0..cutoff

  int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }

  double norm2() const {
    double s = 0.0;
    for (const Complex& c : amplitudes) s += std::norm(c);
    return s;
  }

  // Population of the top `fraction` of the basis; large values mean the
  // cutoff is too small for this state.
  double tail_mass(double fraction = 0.1) const {
    int start = static_cast<int>(std::floor((1.0 - fraction) * (cutoff() + 1)));
    double s = 0.0;
    for (int n = start; n <= cutoff(); ++n) s += std::norm(amplitudes[n]);
    return s;
  }

  void normalize() {
    double n2 = norm2();
    if (!(n2 > 1e-280)) throw degenerate_state_error("FockVector::normalize: zero state");
    double inv = 1.0 / std::sqrt(n2);
    for (Complex& c : amplitudes) c *= inv;
  }
};

enum class OperatorKind { Annihilate, Create, Displace, Squeeze, Quadrature, Parity, Custom };

struct OperatorMatrix {
  Eigen::MatrixXcd mat;
  OperatorKind label = OperatorKind::Custom;
};

inline OperatorMatrix annihilate_op(int cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {std::move(a), OperatorKind::Annihilate};
}

inline OperatorMatrix create_op(int cutoff) {
  OperatorMatrix a = annihilate_op(cutoff);
  return {a.mat.adjoint(), OperatorKind::Create};
}

inline OperatorMatrix quadrature_op(int cutoff) {
  OperatorMatrix a = annihilate_op(cutoff);
  return {(a.mat + a.mat.adjoint()) / std::sqrt(2.0), OperatorKind::Quadrature};
}

inline OperatorMatrix parity_op(int cutoff) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return {std::move(p), OperatorKind::Parity};
}

// exp(M) by scaling and squaring with a residual-controlled truncated series.
inline OperatorMatrix matrix_exponential(const OperatorMatrix& M) {
  if (!M.mat.allFinite()) throw argument_error("matrix_exponential: non-finite entries");
  const int dim = static_cast<int>(M.mat.rows());
  double norm1 = M.mat.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (norm1 / std::pow(2.0, s) > 0.5) ++s;
  constexpr int k_max_scaling = 60;
  if (s > k_max_scaling)
    throw convergence_error("matrix_exponential: norm too large for configured scaling depth");
  Eigen::MatrixXcd B = M.mat / std::pow(2.0, s);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd sum = term;
  bool converged = false;
  for (int k = 1; k <= 40; ++k) {
    term = (term * B) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-300 ||
        term.cwiseAbs().colwise().sum().maxCoeff() < 1e-16 * sum.cwiseAbs().colwise().sum().maxCoeff()) {
      converged = true;
      break;
    }
  }
  if (!converged) throw convergence_error("matrix_exponential: series did not converge");
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return {std::move(sum), OperatorKind::Custom};
}

namespace detail {

using pascs::detail::NeumaierSum;
using pascs::detail::NeumaierSumC;

// out = a v (one superdiagonal of sqrt(n)), in place variants for speed.
inline void apply_annihilate(const std::vector<Complex>& v, std::vector<Complex>& out) {
  int n = static_cast<int>(v.size());
  out.assign(n, Complex(0.0, 0.0));
  for (int k = 1; k < n; ++k) out[k - 1] = std::sqrt(static_cast<double>(k)) * v[k];
}

inline void apply_create(const std::vector<Complex>& v, std::vector<Complex>& out) {
  int n = static_cast<int>(v.size());
  out.assign(n, Complex(0.0, 0.0));
  for (int k = 0; k + 1 < n; ++k) out[k + 1] = std::sqrt(static_cast<double>(k + 1)) * v[k];
}

// w <- exp(G) v where G is given as a matvec; the exponential is applied in
// norm-bounded steps, each step summing the Taylor series of G/steps to
// machine precision.  Equivalent to scaling-and-squaring restricted to the
// vector, at O(cutoff) banded cost per application.
template <class MatVec>
std::vector<Complex> expm_action(MatVec&& G, std::vector<Complex> v, double norm_bound) {
  int steps = std::max(1, static_cast<int>(std::ceil(norm_bound)));
  std::vector<Complex> term(v.size()), next(v.size());
  for (int s = 0; s < steps; ++s) {
    std::vector<Complex> acc = v;
    term = v;
    bool converged = false;
    for (int k = 1; k <= 80; ++k) {
      G(term, next);
      double scale = 1.0 / (static_cast<double>(steps) * k);
      double tn = 0.0, an = 0.0;
      for (size_t i = 0; i < next.size(); ++i) {
        next[i] *= scale;
        acc[i] += next[i];
        tn += std::norm(next[i]);
        an += std::norm(acc[i]);
      }
      term.swap(next);
      if (tn <= 1e-36 * an || tn == 0.0) {
        converged = true;
        break;
      }
    }
    if (!converged) throw convergence_error("expm_action: series did not converge");
    v = std::move(acc);
  }
  return v;
}

// Squeeze generator z/2 a†^2 - z*/2 a^2 as a banded matvec.
struct SqueezeGen {
  Complex half_z;
  void operator()(const std::vector<Complex>& v, std::vector<Complex>& out) const {
    int n = static_cast<int>(v.size());
    out.assign(n, Complex(0.0, 0.0));
    for (int k = 0; k + 2 < n; ++k) {
      double c = std::sqrt(static_cast<double>((k + 1) * (k + 2)));
      out[k + 2] += half_z * c * v[k];
      out[k] -= std::conj(half_z) * c * v[k + 2];
    }
  }
};

// Displacement generator mu a† - mu* a.
struct DisplaceGen {
  Complex mu;
  void operator()(const std::vector<Complex>& v, std::vector<Complex>& out) const {
    int n = static_cast<int>(v.size());
    out.assign(n, Complex(0.0, 0.0));
    for (int k = 0; k + 1 < n; ++k) {
      double c = std::sqrt(static_cast<double>(k + 1));
      out[k + 1] += mu * c * v[k];
      out[k] -= std::conj(mu) * c * v[k + 1];
    }
  }
};

}  // namespace detail

inline OperatorMatrix displace_op(Complex alpha, int cutoff) {
  OperatorMatrix a = annihilate_op(cutoff);
  OperatorMatrix gen{alpha * a.mat.adjoint() - std::conj(alpha) * a.mat, OperatorKind::Custom};
  OperatorMatrix e = matrix_exponential(gen);
  e.label = OperatorKind::Displace;
  return e;
}

inline OperatorMatrix squeeze_op(Complex z, int cutoff) {
  OperatorMatrix a = annihilate_op(cutoff);
  Eigen::MatrixXcd ad2 = a.mat.adjoint() * a.mat.adjoint();
  OperatorMatrix gen{0.5 * z * ad2 - 0.5 * std::conj(z) * (a.mat * a.mat), OperatorKind::Custom};
  OperatorMatrix e = matrix_exponential(gen);
  e.label = OperatorKind::Squeeze;
  return e;
}

// Cutoff heuristic: displaced-squeezed states have Gaussian number tails
// governed by |alpha| e^r; the addition/subtraction shifts by ~m.
inline int default_cutoff(const StateSpec& spec) {
  double s = std::abs(spec.alpha) * std::exp(spec.r) + std::sqrt(static_cast<double>(spec.m)) + 3.0;
  return std::max(32, static_cast<int>(std::ceil(4.0 * s * s)));
}

struct BuildResult {
  FockVector state;   // normalized
  double prenorm2;    // squared norm before normalization (checks N^{-2})
  bool truncation_warning = false;
};

// a^m D(alpha) S(z) |0>  or  a†^m D(alpha) S(z) |0>, normalized.
inline BuildResult build_state(const StateSpec& spec, int cutoff,
                               double tail_tolerance = 1e-12) {
  if (cutoff < 1) throw argument_error("build_state: cutoff must be positive");
  std::vector<Complex> v(cutoff + 1, Complex(0.0, 0.0));
  v[0] = 1.0;
  if (spec.r > 0.0) {
    detail::SqueezeGen sg{0.5 * spec.r * std::exp(Complex(0.0, spec.phi))};
    v = detail::expm_action(sg, std::move(v), spec.r * (cutoff + 2));
  }
  if (std::abs(spec.alpha) > 0.0) {
    detail::DisplaceGen dg{spec.alpha};
    v = detail::expm_action(dg, std::move(v), 2.0 * std::abs(spec.alpha) * std::sqrt(cutoff + 1.0));
  }
  std::vector<Complex> tmp;
  for (int k = 0; k < spec.m; ++k) {
    if (spec.op == Operation::Add)
      detail::apply_create(v, tmp);
    else
      detail::apply_annihilate(v, tmp);
    v.swap(tmp);
  }
  FockVector state{std::move(v)};
  double n2 = state.norm2();
  if (!(n2 > 1e-280))
    throw degenerate_state_error("build_state: subtraction annihilated the state");
  BuildResult res{std::move(state), n2, false};
  res.state.normalize();
  res.truncation_warning = res.state.tail_mass() > tail_tolerance;
  return res;
}

// <a†^p a^q> as the inner product <a^p psi | a^q psi>.
inline Complex oracle_moment(const FockVector& state, int p, int q) {
  if (p < 0 || q < 0 || p + q > state.cutoff() / 2)
    throw bounds_error("oracle_moment: p+q exceeds cutoff/2 accuracy guard");
  std::vector<Complex> vp = state.amplitudes, vq = state.amplitudes, tmp;
  for (int k = 0; k < p; ++k) {
    detail::apply_annihilate(vp, tmp);
    vp.swap(tmp);
  }
  for (int k = 0; k < q; ++k) {
    detail::apply_annihilate(vq, tmp);
    vq.swap(tmp);
  }
  detail::NeumaierSumC s;
  for (size_t i = 0; i < vp.size(); ++i) s.add(std::conj(vp[i]) * vq[i]);
  return s.value();
}

// Central quadrature moment <(X - <X>)^n> with X = (a + a†)/sqrt(2), by
// repeated application of the shifted quadrature matrix.
inline double oracle_quadrature_moment(const FockVector& state, int n) {
  if (n < 0 || n % 2 != 0) throw argument_error("oracle_quadrature_moment: order must be even");
  if (n > 8) throw bounds_error("oracle_quadrature_moment: order must be <= 8");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto apply_x = [&](const std::vector<Complex>& in, std::vector<Complex>& out) {
    int len = static_cast<int>(in.size());
    out.assign(len, Complex(0.0, 0.0));
    for (int k = 0; k + 1 < len; ++k) {
      double c = std::sqrt(static_cast<double>(k + 1)) * inv_sqrt2;
      out[k + 1] += c * in[k];
      out[k] += c * in[k + 1];
    }
  };
  std::vector<Complex> xv;
  apply_x(state.amplitudes, xv);
  detail::NeumaierSumC mean_acc;
  for (size_t i = 0; i < xv.size(); ++i) mean_acc.add(std::conj(state.amplitudes[i]) * xv[i]);
  double xbar = mean_acc.value().real();

  std::vector<Complex> w = state.amplitudes, tmp;
  for (int k = 0; k < n; ++k) {
    apply_x(w, tmp);
    for (size_t i = 0; i < w.size(); ++i) tmp[i] -= xbar * w[i];
    w.swap(tmp);
  }
  detail::NeumaierSumC s;
  for (size_t i = 0; i < w.size(); ++i) s.add(std::conj(state.amplitudes[i]) * w[i]);
  return s.value().real();
}

namespace detail {

// D(mu) v, exact BCH factorization e^{-|mu|^2/2} e^{mu a†} e^{-mu* a} applied
// in steps of |mu| <= 1/2 to bound intermediate growth.  `headroom` extends
// the basis so the displaced state is not clipped.
inline std::vector<Complex> displace_action(std::vector<Complex> v, Complex mu, int headroom) {
  int dim = static_cast<int>(v.size()) + headroom;
  v.resize(dim, Complex(0.0, 0.0));
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(mu) / 0.5)));
  Complex step = mu / static_cast<double>(steps);
  std::vector<Complex> term(dim), acc(dim);
  for (int s = 0; s < steps; ++s) {
    // e^{-step* a}
    acc = v;
    term = v;
    for (int k = 1; k <= 400; ++k) {
      double tn = 0.0;
      Complex c = -std::conj(step) / static_cast<double>(k);
      for (int i = 0; i + 1 < dim; ++i) {
        term[i] = c * std::sqrt(static_cast<double>(i + 1)) * term[i + 1];
        acc[i] += term[i];
        tn += std::norm(term[i]);
      }
      term[dim - 1] = 0.0;
      if (tn <= 1e-36) break;
    }
    // e^{step a†}
    v = acc;
    term = acc;
    for (int k = 1; k <= 400; ++k) {
      double tn = 0.0;
      Complex c = step / static_cast<double>(k);
      for (int i = dim - 1; i >= 1; --i) {
        term[i] = c * std::sqrt(static_cast<double>(i)) * term[i - 1];
        v[i] += term[i];
        tn += std::norm(term[i]);
      }
      term[0] = 0.0;
      if (tn <= 1e-36) break;
    }
    double damp = std::exp(-0.5 * std::norm(step));
    for (Complex& c : v) c *= damp;
  }
  return v;
}

}  // namespace detail

// Wigner value at gamma via the displaced-parity identity
// W(gamma) = (2/pi) sum_k (-1)^k |<k| D†(gamma) |psi>|^2.
inline double oracle_wigner(const FockVector& state, Complex gamma) {
  double guard = 0.75 * std::sqrt(static_cast<double>(state.cutoff()));
  if (std::abs(gamma) > guard)
    throw bounds_error("oracle_wigner: |gamma| too large for this cutoff");
  double g = std::abs(gamma);
  int headroom = static_cast<int>(std::ceil(2.0 * g * std::sqrt(state.cutoff() + 1.0) + 8.0 * g + 16.0));
  std::vector<Complex> u = detail::displace_action(state.amplitudes, -gamma, headroom);
  detail::NeumaierSum s;
  for (size_t k = 0; k < u.size(); ++k) s.add((k % 2 == 0 ? 1.0 : -1.0) * std::norm(u[k]));
  return 2.0 / (0.5 * k_two_pi) * s.value();
}

}  // namespace pascs::oracle
