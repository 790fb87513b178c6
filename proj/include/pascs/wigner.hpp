#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "pascs/errors.hpp"
#include "pascs/pnd.hpp"
#include "pascs/quadrature.hpp"
#include "pascs/specfun.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/states.hpp"

namespace pascs {

// Closed-form Wigner function W(gamma) = W_SCS(gamma) * F±(m, gamma) in the
// factorized form; gamma = (x + i p)/sqrt(2), d^2 gamma = dx dp / 2.
inline double wigner_closed(const StateSpec& spec, Complex gamma) {
  spec.require_nondegenerate();
  if (spec.r <= k_epsilon_r) {
    // r = 0 limits: photon-added coherent state (Laguerre form) or coherent.
    double gauss = 2.0 / k_pi * std::exp(-2.0 * std::norm(gamma - spec.alpha));
    if (spec.op == Operation::Subtract || spec.m == 0) return gauss;
    double sign = (spec.m % 2 == 0) ? 1.0 : -1.0;
    double lag = laguerre(spec.m, std::norm(2.0 * gamma - spec.alpha));
    return gauss * sign * lag / laguerre(spec.m, -std::norm(spec.alpha));
  }
  const double ch = std::cosh(spec.r), sh = std::sinh(spec.r);
  const double sh2 = std::sinh(2.0 * spec.r);
  const Complex eiphi = std::exp(Complex(0.0, spec.phi));
  const Complex eihalf = std::exp(Complex(0.0, spec.phi / 2.0));
  const Complex beta = beta_parameter(spec);
  const Complex gc = std::conj(gamma);
  const double w_scs = 2.0 / k_pi * std::exp(-2.0 * std::norm(gamma * ch - gc * eiphi * sh - beta));

  Complex b;
  double hyp;
  if (spec.op == Operation::Add) {
    b = (2.0 * gamma * ch * ch - beta * ch) / eihalf - eihalf * (gc * sh2 - std::conj(beta) * sh);
    hyp = -2.0 / std::tanh(spec.r);
  } else {
    b = (beta * ch - 2.0 * gamma * sh * sh) / eihalf - eihalf * (std::conj(beta) * sh - gc * sh2);
    hyp = -2.0 * std::tanh(spec.r);
  }
  const Complex arg = Complex(0.0, -1.0) * b / std::sqrt(sh2);
  const auto H = hermite_sequence(spec.m, arg);
  const auto& comb = combinatorics();
  detail::NeumaierSum sum;
  double hyp_pow = 1.0;
  for (int l = 0; l <= spec.m; ++l) {
    double c = comb.falling_factorial_d(spec.m, l);  // m!/(m-l)!
    sum.add(hyp_pow / comb.factorial_d(l) * c * c * std::norm(H[spec.m - l]));
    hyp_pow *= hyp;
  }
  double n_sq = 1.0 / detail::norm_inv_sq_general(spec.op, spec.m, spec.alpha, spec.r, spec.phi);
  return w_scs * n_sq * std::pow(sh2 / 4.0, spec.m) * sum.value();
}

// Sampled W on a rectangular (x, p) grid, gamma = (x + i p)/sqrt(2); values
// stored row-major with x fastest.
struct WignerGrid {
  StateSpec spec;
  double x_min = 0, x_max = 0, p_min = 0, p_max = 0;
  int nx = 0, np = 0;
  std::vector<double> values;
  std::string convention_note = "gamma = (x + i*p)/sqrt(2), d^2gamma = dx dp / 2";

  double at(int ix, int ip) const { return values[static_cast<size_t>(ip) * nx + ix]; }
};

// Half-width in x (and p) that comfortably contains the state's support.
inline double default_grid_halfwidth(const StateSpec& spec) {
  double center = std::sqrt(2.0) * std::abs(beta_parameter(spec));
  return center + (4.0 + spec.m) * std::exp(spec.r);
}

inline WignerGrid wigner_grid(const StateSpec& spec, double x_min, double x_max, double p_min,
                              double p_max, int nx, int np) {
  if (nx < 2 || np < 2) throw argument_error("wigner_grid: need at least 2x2 samples");
  if (!(x_max > x_min) || !(p_max > p_min))
    throw argument_error("wigner_grid: empty ranges");
  WignerGrid grid;
  grid.spec = spec;
  grid.x_min = x_min;
  grid.x_max = x_max;
  grid.p_min = p_min;
  grid.p_max = p_max;
  grid.nx = nx;
  grid.np = np;
  grid.values.resize(static_cast<size_t>(nx) * np);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int ip = 0; ip < np; ++ip) {
    double p = p_min + (p_max - p_min) * ip / (np - 1.0);
    for (int ix = 0; ix < nx; ++ix) {
      double x = x_min + (x_max - x_min) * ix / (nx - 1.0);
      grid.values[static_cast<size_t>(ip) * nx + ix] =
          wigner_closed(spec, Complex(x * inv_sqrt2, p * inv_sqrt2));
    }
  }
  return grid;
}

inline WignerGrid wigner_grid(const StateSpec& spec, double halfwidth, int n) {
  return wigner_grid(spec, -halfwidth, halfwidth, -halfwidth, halfwidth, n, n);
}

struct NonclassicalVolumeResult {
  double delta = 0.0;
  double integration_radius = 0.0;  // half-width of the final square
  double estimated_tail = 0.0;
  int refinement_levels = 0;
};

namespace detail {

// Integral of f over [-L, L]^2 in the gamma plane with P x P panels of
// 32-point Gauss-Legendre; fixed order of accumulation keeps results
// deterministic at any concurrency level of the callers.
template <class F>
std::pair<double, double> panel_integrate(F&& f, double half_width, int panels) {
  const GaussLegendreRule& rule = gauss_legendre(32);
  const double h = 2.0 * half_width / panels;
  NeumaierSum total_abs;
  NeumaierSum total;
  for (int py = 0; py < panels; ++py) {
    double cy = -half_width + (py + 0.5) * h;
    for (int px = 0; px < panels; ++px) {
      double cx = -half_width + (px + 0.5) * h;
      NeumaierSum panel_abs, panel;
      for (size_t iy = 0; iy < rule.nodes.size(); ++iy) {
        double y = cy + 0.5 * h * rule.nodes[iy];
        for (size_t ix = 0; ix < rule.nodes.size(); ++ix) {
          double x = cx + 0.5 * h * rule.nodes[ix];
          double w = rule.weights[ix] * rule.weights[iy];
          double v = f(Complex(x, y));
          panel.add(w * v);
          panel_abs.add(w * std::abs(v));
        }
      }
      double scale = 0.25 * h * h;
      total.add(scale * panel.value());
      total_abs.add(scale * panel_abs.value());
    }
  }
  return {total_abs.value(), total.value()};
}

// One square panel of the adaptive |W| integration.  `err` is the embedded
// GL-8 vs GL-16 difference of the |f| integral; |W| has a gradient kink on
// the W = 0 curves, so refinement concentrates exactly there while smooth
// panels converge immediately.
struct AbsPanel {
  double cx, cy, h;
  int depth;
  double integral_abs;
  double integral_signed;
  double err;
};

template <class F>
AbsPanel evaluate_abs_panel(F&& f, double cx, double cy, double h, int depth) {
  const GaussLegendreRule& lo = gauss_legendre(8);
  const GaussLegendreRule& hi = gauss_legendre(16);
  auto quad = [&](const GaussLegendreRule& rule, bool want_signed) {
    NeumaierSum abs_sum, signed_sum;
    for (size_t iy = 0; iy < rule.nodes.size(); ++iy) {
      double y = cy + 0.5 * h * rule.nodes[iy];
      for (size_t ix = 0; ix < rule.nodes.size(); ++ix) {
        double x = cx + 0.5 * h * rule.nodes[ix];
        double w = rule.weights[ix] * rule.weights[iy];
        double v = f(Complex(x, y));
        abs_sum.add(w * std::abs(v));
        if (want_signed) signed_sum.add(w * v);
      }
    }
    double scale = 0.25 * h * h;
    return std::pair<double, double>(scale * abs_sum.value(), scale * signed_sum.value());
  };
  auto [abs_lo, unused] = quad(lo, false);
  auto [abs_hi, signed_hi] = quad(hi, true);
  return AbsPanel{cx, cy, h, depth, abs_hi, signed_hi, std::abs(abs_hi - abs_lo)};
}

}  // namespace detail

// Nonclassical volume delta = (integral of |W| - 1)/2 by adaptive
// tensor-product Gauss-Legendre quadrature over a growing square, with a
// Gaussian-envelope bound on the exterior contribution.
inline NonclassicalVolumeResult nonclassical_volume(const StateSpec& spec, double tol = 1e-6) {
  spec.require_nondegenerate();
  if (!(tol >= 1e-6)) throw argument_error("nonclassical_volume: tol must be >= 1e-6");
  const Complex beta = beta_parameter(spec);
  const double l0 =
      std::sqrt(2.0) * std::abs(beta) + 4.0 * std::exp(spec.r) * std::sqrt(spec.m + 1.0);

  auto f = [&](Complex gamma) { return wigner_closed(spec, gamma); };

  // Envelope bound beyond radius rho: |W| <= C rho^{2m} exp(-2 (e^{-r} rho - |beta|)^2),
  // calibrated on boundary samples with a safety factor.
  auto tail_bound = [&](double half_width) {
    const double decay = std::exp(-spec.r);
    const double b = std::abs(beta);
    double c_cal = 0.0;
    const int n_samp = 128;
    for (int i = 0; i < n_samp; ++i) {
      double t = -half_width + 2.0 * half_width * i / (n_samp - 1.0);
      for (Complex g : {Complex(t, half_width), Complex(t, -half_width),
                        Complex(half_width, t), Complex(-half_width, t)}) {
        double rho = std::abs(g);
        double env = std::pow(rho, 2 * spec.m) *
                     std::exp(-2.0 * std::pow(std::max(decay * rho - b, 0.0), 2));
        if (env > 0.0) c_cal = std::max(c_cal, std::abs(f(g)) / env);
      }
    }
    c_cal *= 8.0;
    // integral over rho in [half_width, inf) of 2 pi rho * C rho^{2m} exp(...)
    const GaussLegendreRule& rule = gauss_legendre(64);
    double lo = half_width, hi = half_width + 12.0 * std::exp(spec.r);
    double mid = 0.5 * (hi + lo), span = 0.5 * (hi - lo);
    double integral = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      double rho = mid + span * rule.nodes[i];
      integral += rule.weights[i] * span * 2.0 * k_pi * rho * std::pow(rho, 2 * spec.m) *
                  std::exp(-2.0 * std::pow(std::max(decay * rho - b, 0.0), 2));
    }
    return c_cal * integral;
  };

  double half_width = l0;
  double last_delta = std::numeric_limits<double>::quiet_NaN();
  constexpr int k_max_domain_growth = 6;
  for (int growth = 0; growth < k_max_domain_growth; ++growth) {
    double tail = tail_bound(half_width);
    if (tail >= 0.45 * tol) {
      half_width *= 1.25;
      continue;
    }
    // seed panels of size ~1.5, refined where the embedded error estimate is
    // large (the |W| kink on the W = 0 curves)
    int seed = std::max(2, static_cast<int>(std::ceil(2.0 * half_width / 1.5)));
    double h = 2.0 * half_width / seed;
    std::vector<detail::AbsPanel> panels;
    panels.reserve(static_cast<size_t>(seed) * seed);
    for (int py = 0; py < seed; ++py)
      for (int px = 0; px < seed; ++px)
        panels.push_back(detail::evaluate_abs_panel(f, -half_width + (px + 0.5) * h,
                                                    -half_width + (py + 0.5) * h, h, 0));
    constexpr size_t k_panel_budget = 120000;
    int max_depth = 0;
    for (;;) {
      double total_err = 0.0;
      size_t worst = 0;
      for (size_t i = 0; i < panels.size(); ++i) {
        total_err += panels[i].err;
        if (panels[i].err > panels[worst].err) worst = i;
      }
      if (total_err < 0.45 * tol) break;
      if (panels.size() + 4 > k_panel_budget) {
        detail::NeumaierSum acc;
        for (const auto& p : panels) acc.add(p.integral_abs);
        throw convergence_error(
            "nonclassical_volume: refinement budget exhausted (delta estimate " +
            format_double(0.5 * (acc.value() - 1.0)) + ", error estimate " +
            format_double(0.5 * total_err) + ")");
      }
      detail::AbsPanel p = panels[worst];
      panels[worst] = panels.back();
      panels.pop_back();
      double q = p.h / 4.0, hh = p.h / 2.0;
      for (int sy : {-1, 1})
        for (int sx : {-1, 1})
          panels.push_back(
              detail::evaluate_abs_panel(f, p.cx + sx * q, p.cy + sy * q, hh, p.depth + 1));
      max_depth = std::max(max_depth, p.depth + 1);
    }
    detail::NeumaierSum abs_acc, signed_acc;
    std::sort(panels.begin(), panels.end(), [](const detail::AbsPanel& a, const detail::AbsPanel& b) {
      return a.cy != b.cy ? a.cy < b.cy : (a.cx != b.cx ? a.cx < b.cx : a.h < b.h);
    });
    for (const auto& p : panels) {
      abs_acc.add(p.integral_abs);
      signed_acc.add(p.integral_signed);
    }
    double delta = 0.5 * (abs_acc.value() - 1.0);
    last_delta = delta;
    // the signed integral must recover the state norm on this domain
    if (std::abs(signed_acc.value() - 1.0) > 0.45 * tol + tail) {
      half_width *= 1.25;
      continue;
    }
    NonclassicalVolumeResult res;
    res.delta = (std::abs(delta) < tol) ? 0.0 : std::max(0.0, delta);
    res.integration_radius = half_width;
    res.estimated_tail = tail;
    res.refinement_levels = max_depth;
    return res;
  }
  throw convergence_error("nonclassical_volume: domain growth exhausted (last delta " +
                          format_double(last_delta) + ")");
}

// --- serialization ---

inline void wigner_grid_csv(const WignerGrid& grid, std::ostream& os) {
  os << "# " << kv_string(grid.spec) << "\n";
  os << "# " << grid.convention_note << "\n";
  os << "x,p,W\n";
  for (int ip = 0; ip < grid.np; ++ip) {
    double p = grid.p_min + (grid.p_max - grid.p_min) * ip / (grid.np - 1.0);
    for (int ix = 0; ix < grid.nx; ++ix) {
      double x = grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1.0);
      os << format_double(x) << ',' << format_double(p) << ','
         << format_double(grid.at(ix, ip)) << '\n';
    }
  }
}

// Binary layout: magic "PASCSWG1", int32 nx, int32 np, float64 x_min, x_max,
// p_min, p_max, then nx*np row-major float64 (x fastest), native little
// endian.
inline void wigner_grid_binary(const WignerGrid& grid, std::ostream& os) {
  const char magic[8] = {'P', 'A', 'S', 'C', 'S', 'W', 'G', '1'};
  os.write(magic, 8);
  std::int32_t nx = grid.nx, np = grid.np;
  os.write(reinterpret_cast<const char*>(&nx), 4);
  os.write(reinterpret_cast<const char*>(&np), 4);
  for (double v : {grid.x_min, grid.x_max, grid.p_min, grid.p_max})
    os.write(reinterpret_cast<const char*>(&v), 8);
  os.write(reinterpret_cast<const char*>(grid.values.data()),
           static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
}

inline WignerGrid wigner_grid_from_binary(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "PASCSWG1", 8) != 0)
    throw argument_error("wigner_grid_from_binary: bad magic");
  WignerGrid grid;
  std::int32_t nx = 0, np = 0;
  is.read(reinterpret_cast<char*>(&nx), 4);
  is.read(reinterpret_cast<char*>(&np), 4);
  grid.nx = nx;
  grid.np = np;
  for (double* v : {&grid.x_min, &grid.x_max, &grid.p_min, &grid.p_max})
    is.read(reinterpret_cast<char*>(v), 8);
  grid.values.resize(static_cast<size_t>(nx) * np);
  is.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!is) throw argument_error("wigner_grid_from_binary: truncated stream");
  return grid;
}

}  // namespace pascs
