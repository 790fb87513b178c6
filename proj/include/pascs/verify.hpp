#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "pascs/errors.hpp"
#include "pascs/moments.hpp"
#include "pascs/oracle.hpp"
#include "pascs/pnd.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/states.hpp"
#include "pascs/wigner.hpp"
#include "pascs/witnesses.hpp"

// Cross-validation of every closed form against the truncated-Fock-space
// oracle, plus the figure-level sign/monotonicity/periodicity claims.  The
// same checks back the `verify` CLI subcommand and the acceptance suite.

namespace pascs::verify {

struct Deviation {
  std::string quantity;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string worst_case;
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = true;
  std::vector<Deviation> deviations;
  std::vector<std::string> notes;
  double seconds = 0.0;
};

struct VerifyReport {
  std::string grid_description;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, std::string>> adjudications;
  bool pass = true;
};

struct VerifyOptions {
  bool quick = false;
  int threads = 0;            // 0 = hardware default
  double moment_fault = 0.0;  // test-harness hook: perturbs closed-form moments
};

namespace detail {

using pascs::detail::NeumaierSum;

struct DeviationTracker {
  Deviation dev;
  explicit DeviationTracker(std::string quantity, double tol) {
    dev.quantity = std::move(quantity);
    dev.tolerance = tol;
  }
  // closeness in the acceptance sense: relative above `scale`, absolute below
  void record(double abs_err, double rel_err, const std::string& where) {
    if (std::max(abs_err, 0.0) > dev.max_abs) dev.max_abs = abs_err;
    if (rel_err > dev.max_rel) {
      dev.max_rel = rel_err;
      dev.worst_case = where;
    }
  }
  Deviation finish(bool use_rel = true) {
    dev.pass = (use_rel ? dev.max_rel : dev.max_abs) <= dev.tolerance;
    return dev;
  }
};

inline std::vector<StateSpec> acceptance_grid(bool quick) {
  std::vector<Complex> alphas = {Complex(0.0, 0.0), std::polar(0.5, k_two_pi / 6.0),
                                 std::polar(std::sqrt(2.0 / 3.0), k_two_pi / 6.0),
                                 Complex(1.2, 0.0)};
  std::vector<double> rs = {0.0, 0.1, 0.4, 0.8};
  std::vector<double> phis = {0.0, 0.25 * k_two_pi, 0.5 * k_two_pi};
  int m_max = quick ? 1 : 3;
  if (quick) {
    alphas = {std::polar(0.5, k_two_pi / 6.0), Complex(1.2, 0.0)};
    rs = {0.0, 0.4};
    phis = {0.0, 0.25 * k_two_pi};
  }
  std::vector<StateSpec> grid;
  for (Operation op : {Operation::Add, Operation::Subtract})
    for (Complex a : alphas)
      for (double r : rs)
        for (double phi : phis)
          for (int m = 0; m <= m_max; ++m) {
            StateSpec spec(op, m, a, r, phi);
            if (!spec.degenerate()) grid.push_back(spec);
          }
  return grid;
}

// Oracle states shared across checks: built once per spec at a cutoff that
// has been validated by doubling until low-order observables stop moving.
class OracleCache {
 public:
  explicit OracleCache(int threads) : threads_(threads) {}

  const oracle::BuildResult& get(const StateSpec& spec) {
    auto key = kv_string(spec);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    oracle::BuildResult built = build_converged(spec);  // outside the lock
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(built)).first->second;
  }

  void prebuild(const std::vector<StateSpec>& grid) {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= grid.size()) return;
        get(grid[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads_; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  static oracle::BuildResult build_converged(const StateSpec& spec) {
    int cutoff = std::max(oracle::default_cutoff(spec), 56);
    oracle::BuildResult prev = oracle::build_state(spec, cutoff);
    for (int doubling = 0; doubling < 3; ++doubling) {
      oracle::BuildResult wide = oracle::build_state(spec, cutoff * 2);
      double move = observable_move(prev, wide);
      if (move < 1e-10) return wide;
      prev = std::move(wide);
      cutoff *= 2;
    }
    return prev;
  }

 private:
  static double observable_move(const oracle::BuildResult& a, const oracle::BuildResult& b) {
    double worst = std::abs(a.prenorm2 - b.prenorm2) / std::max(1.0, std::abs(b.prenorm2));
    for (int p = 0; p <= 2; ++p)
      for (int q = 0; q <= 2; ++q) {
        Complex ma = oracle::oracle_moment(a.state, p, q);
        Complex mb = oracle::oracle_moment(b.state, p, q);
        worst = std::max(worst, std::abs(ma - mb) / std::max(1.0, std::abs(mb)));
      }
    for (int n = 0; n <= std::min(40, a.state.cutoff()); ++n)
      worst = std::max(worst,
                       std::abs(std::norm(a.state.amplitudes[n]) - std::norm(b.state.amplitudes[n])));
    return worst;
  }

  int threads_;
  std::mutex mu_;
  std::map<std::string, oracle::BuildResult> cache_;
};

template <class F>
void parallel_over(int threads, size_t count, F&& body) {
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// Criterion 1: closed-form moments match the oracle on the full grid.
inline CheckResult check_moments(const std::vector<StateSpec>& grid, detail::OracleCache& cache,
                                 const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{1, "moment oracle equivalence"};
  const int order = opt.quick ? 2 : 4;
  detail::DeviationTracker track("moment", 1e-8);
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), grid.size(), [&](size_t i) {
    const StateSpec& spec = grid[i];
    const auto& bundle = cache.get(spec);
    for (int p = 0; p <= order; ++p)
      for (int q = 0; q <= order; ++q) {
        Complex closed = moment(spec, p, q) * (1.0 + opt.moment_fault);
        Complex orac = oracle::oracle_moment(bundle.state, p, q);
        double abs_err = std::abs(closed - orac);
        double rel = abs_err / std::max(1.0, std::abs(orac));
        // absolute tolerance 1e-10 below |oracle| = 1
        double gated = (std::abs(orac) < 1.0) ? abs_err * 1e-8 / 1e-10 : rel;
        std::lock_guard<std::mutex> lock(mu);
        track.record(abs_err, gated,
                     kv_string(spec) + " (p=" + std::to_string(p) + ",q=" + std::to_string(q) + ")");
      }
  });
  res.deviations.push_back(track.finish());
  res.pass = res.deviations.back().pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 2: N±^{-2} matches the oracle pre-normalization norm; the four
// special-case reductions agree with the general formulas.
inline CheckResult check_normalization(const std::vector<StateSpec>& grid,
                                       detail::OracleCache& cache, const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{2, "normalization"};
  detail::DeviationTracker track("normalization", 1e-8);
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), grid.size(), [&](size_t i) {
    const StateSpec& spec = grid[i];
    const auto& bundle = cache.get(spec);
    double closed_inv_sq = 1.0 / std::pow(normalization(spec), 2);
    double rel = std::abs(closed_inv_sq - bundle.prenorm2) / std::abs(bundle.prenorm2);
    std::lock_guard<std::mutex> lock(mu);
    track.record(std::abs(closed_inv_sq - bundle.prenorm2), rel, kv_string(spec));
  });
  res.deviations.push_back(track.finish());

  detail::DeviationTracker red("reductions", 1e-10);
  for (const StateSpec& spec : grid) {
    bool special = (spec.r <= k_epsilon_r) || std::abs(spec.alpha) == 0.0;
    if (!special) continue;
    double a = normalization(spec);
    double b = normalization_reductions(spec);
    double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-30});
    red.record(std::abs(a - b), rel, kv_string(spec));
  }
  res.deviations.push_back(red.finish());
  res.pass = res.deviations[0].pass && res.deviations[1].pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 3: P_n vs |<n|psi>|^2, sum deficit, structural hole burning.
inline CheckResult check_distributions(const std::vector<StateSpec>& grid,
                                       detail::OracleCache& cache, const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{3, "photon-number distributions"};
  detail::DeviationTracker track("pnd", 1e-10);
  detail::DeviationTracker deficit("pnd sum deficit", 1e-10);
  bool holes_ok = true;
  std::string hole_fail;
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), grid.size(), [&](size_t i) {
    const StateSpec& spec = grid[i];
    const auto& bundle = cache.get(spec);
    const int n_top = std::min(40, bundle.state.cutoff());
    auto dist = pnd(spec, bundle.state.cutoff());  // shared index range
    double local_abs = 0.0;
    std::string local_where;
    for (int n = 0; n <= n_top; ++n) {
      double orac = std::norm(bundle.state.amplitudes[n]);
      double err = std::abs(dist.probabilities[n] - orac);
      if (err > local_abs) {
        local_abs = err;
        local_where = kv_string(spec) + " n=" + std::to_string(n);
      }
    }
    bool local_holes = true;
    if (spec.op == Operation::Add)
      for (int n = 0; n < spec.m; ++n)
        if (dist.probabilities[n] != 0.0) local_holes = false;
    std::lock_guard<std::mutex> lock(mu);
    track.record(local_abs, local_abs, local_where);
    deficit.record(std::abs(dist.tail_mass), std::abs(dist.tail_mass), kv_string(spec));
    if (!local_holes) {
      holes_ok = false;
      hole_fail = kv_string(spec);
    }
  });
  res.deviations.push_back(track.finish());
  res.deviations.push_back(deficit.finish());
  Deviation holes{"hole burning (P_n = 0 for n < m)", 0.0, 0.0, 0.0, holes_ok, hole_fail};
  res.deviations.push_back(holes);
  res.pass = res.deviations[0].pass && res.deviations[1].pass && holes_ok;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 4: Klyshko zero identity on coherent states; negativity for the
// added-photon family alpha = 1, m = 1, r in {0.1, 0.3, 0.5}.
inline CheckResult check_klyshko(const VerifyOptions&) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{4, "Klyshko criterion"};
  detail::DeviationTracker zero("klyshko coherent zero", 1e-12);
  for (double mod : {0.6, 1.0, 1.3}) {
    StateSpec spec(Operation::Add, 0, std::polar(mod, 0.7), 0.0, 0.0);
    auto dist = pnd(spec, 14);
    for (int n = 0; n <= 10; ++n)
      zero.record(std::abs(klyshko(dist, n)), std::abs(klyshko(dist, n)),
                  "coherent |alpha|=" + format_double(mod) + " n=" + std::to_string(n));
  }
  res.deviations.push_back(zero.finish());
  bool neg_ok = true;
  std::string detail_note;
  for (double r : {0.1, 0.3, 0.5}) {
    StateSpec spec(Operation::Add, 1, Complex(1.0, 0.0), r, 0.0);
    auto dist = pnd(spec, 14);
    double best = 0.0;
    for (int n = 0; n <= 10; ++n) best = std::min(best, klyshko(dist, n));
    if (!(best < 0.0)) neg_ok = false;
    detail_note += " r=" + format_double(r) + ": min B=" + format_double(best);
  }
  res.notes.push_back("added-photon family minima:" + detail_note);
  Deviation neg{"klyshko negativity (add, alpha=1, m=1)", 0, 0, 0, neg_ok, detail_note};
  res.deviations.push_back(neg);
  res.pass = res.deviations[0].pass && neg_ok;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace detail {

// The A3 determinant ratio evaluated on any diagonal-moment source.
inline double a3_from_diag(const std::function<double(int)>& diag) {
  const auto& comb = combinatorics();
  std::array<double, 5> mk{1, 0, 0, 0, 0}, mu{1, 0, 0, 0, 0};
  for (int k = 1; k <= 4; ++k) {
    mk[k] = diag(k);
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += comb.stirling2_d(k, j) * mk[j];
    mu[k] = s;
  }
  double dm = pascs::detail::det3(mk), dmu = pascs::detail::det3(mu);
  return dm / (dmu - dm);
}

}  // namespace detail

// Criterion 5: A3 pinned on Fock and coherent states, and the same formula on
// oracle moments across the grid.
inline CheckResult check_agarwal(const std::vector<StateSpec>& grid, detail::OracleCache& cache,
                                 const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{5, "Agarwal A3"};
  // |2>..|4>: the ratio is exactly -1 there.  |1> has det m = det mu = 0
  // identically (0/0, direction-dependent limits) and reports as undefined.
  detail::DeviationTracker fock("A3 on Fock states (-1)", 1e-9);
  for (int m = 2; m <= 4; ++m) {
    MomentTable table(StateSpec(Operation::Add, m, Complex(0, 0), 0.0, 0.0));
    double v = agarwal_a3(table);
    fock.record(std::abs(v + 1.0), std::abs(v + 1.0), "Fock m=" + std::to_string(m));
  }
  res.deviations.push_back(fock.finish());
  bool fock1_undefined = false;
  try {
    MomentTable table(StateSpec(Operation::Add, 1, Complex(0, 0), 0.0, 0.0));
    agarwal_a3(table);
  } catch (const undefined_witness_error&) {
    fock1_undefined = true;
  }
  res.deviations.push_back({"A3 on |1> reports the 0/0 denominator", 0, 0, 0, fock1_undefined,
                            "det m(3) = det mu(3) = 0 identically on |1>"});

  detail::DeviationTracker coh("A3 on coherent states (0)", 1e-10);
  for (double mod : {0.5, 1.0}) {
    MomentTable table(StateSpec(Operation::Add, 0, std::polar(mod, 0.3), 0.0, 0.0));
    double v = agarwal_a3(table);
    coh.record(std::abs(v), std::abs(v), "coherent |alpha|=" + format_double(mod));
  }
  res.deviations.push_back(coh.finish());

  detail::DeviationTracker track("A3 closed vs oracle-moment formula", 1e-8);
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), grid.size(), [&](size_t i) {
    const StateSpec& spec = grid[i];
    const auto& bundle = cache.get(spec);
    double closed, orac;
    try {
      MomentTable table(spec);
      closed = agarwal_a3(table);
      orac = detail::a3_from_diag(
          [&](int k) { return oracle::oracle_moment(bundle.state, k, k).real(); });
    } catch (const undefined_witness_error&) {
      return;  // both routes are singular there (vacuum)
    }
    double err = std::abs(closed - orac);
    std::lock_guard<std::mutex> lock(mu);
    track.record(err, err / std::max(1.0, std::abs(orac)), kv_string(spec));
  });
  res.deviations.push_back(track.finish());
  res.pass = true;
  for (const auto& d : res.deviations) res.pass = res.pass && d.pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 6: Hong-Mandel squeezing: coherent zeros, squeezed-vacuum value,
// and the pair-contraction expansion against oracle quadrature moments (this
// adjudicates the contraction weight).
inline CheckResult check_hong_mandel(const std::vector<StateSpec>& grid,
                                     detail::OracleCache& cache, const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{6, "Hong-Mandel squeezing"};
  detail::DeviationTracker coh("S(2), S(4) on coherent states", 1e-10);
  for (double mod : {0.5, 1.0}) {
    StateSpec spec(Operation::Add, 0, std::polar(mod, 1.1), 0.0, 0.0);
    MomentTable table(spec);
    for (int n : {2, 4}) {
      double v = hong_mandel(spec, table, n);
      coh.record(std::abs(v), std::abs(v), "coherent n=" + std::to_string(n));
    }
  }
  res.deviations.push_back(coh.finish());

  detail::DeviationTracker sv("squeezed vacuum S(2) = e^{-1} - 1", 1e-9);
  {
    StateSpec spec(Operation::Add, 0, Complex(0, 0), 0.5, 0.5 * k_two_pi);
    MomentTable table(spec);
    double v = hong_mandel(spec, table, 2);
    double expect = std::exp(-1.0) - 1.0;
    sv.record(std::abs(v - expect), std::abs(v - expect), "r=0.5 phi=pi");
  }
  res.deviations.push_back(sv.finish());

  detail::DeviationTracker track("central quadrature moments vs oracle", 1e-8);
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), grid.size(), [&](size_t i) {
    const StateSpec& spec = grid[i];
    const auto& bundle = cache.get(spec);
    MomentTable table(spec, 12);
    for (int n : {2, 4, 6}) {
      double closed = pascs::detail::central_quadrature_moment(table, n);
      double orac = oracle::oracle_quadrature_moment(bundle.state, n);
      double err = std::abs(closed - orac);
      std::lock_guard<std::mutex> lock(mu);
      track.record(err, err / std::max(1.0, std::abs(orac)),
                   kv_string(spec) + " n=" + std::to_string(n));
    }
  });
  res.deviations.push_back(track.finish());
  res.pass = res.deviations[0].pass && res.deviations[1].pass && res.deviations[2].pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 7: Wigner closed form vs displaced-parity oracle pointwise,
// unit integral, center-sign parity alternation, and the 2/pi bound.
inline CheckResult check_wigner(const std::vector<StateSpec>& grid, detail::OracleCache& cache,
                                const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{7, "Wigner function"};
  const int n_side = opt.quick ? 5 : 21;
  detail::DeviationTracker track("wigner pointwise vs oracle", 1e-7);
  detail::DeviationTracker bound("wigner bound |W| <= 2/pi", 1e-9);
  std::vector<StateSpec> subset;
  for (const auto& spec : grid)
    if (spec.r > 0.0) subset.push_back(spec);
  std::mutex mu;
  detail::parallel_over(std::max(1, opt.threads), subset.size(), [&](size_t i) {
    const StateSpec& spec = subset[i];
    const auto& bundle = cache.get(spec);
    double local_abs = 0.0, local_bound = 0.0;
    std::string local_where;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int iy = 0; iy < n_side; ++iy) {
      double p = -3.0 + 6.0 * iy / (n_side - 1.0);
      for (int ix = 0; ix < n_side; ++ix) {
        double x = -3.0 + 6.0 * ix / (n_side - 1.0);
        Complex gamma(x * inv_sqrt2, p * inv_sqrt2);
        double closed = wigner_closed(spec, gamma);
        double orac = oracle::oracle_wigner(bundle.state, gamma);
        double err = std::abs(closed - orac);
        if (err > local_abs) {
          local_abs = err;
          local_where = kv_string(spec) + " x=" + format_double(x) + " p=" + format_double(p);
        }
        local_bound = std::max(local_bound, std::abs(closed) - 2.0 / k_pi);
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    track.record(local_abs, local_abs, local_where);
    bound.record(std::max(local_bound, 0.0), std::max(local_bound, 0.0), kv_string(spec));
  });
  res.deviations.push_back(track.finish());
  res.deviations.push_back(bound.finish());

  // unit integral of W (signed) on the acceptance specs
  detail::DeviationTracker integ("wigner unit integral", 1e-6);
  std::vector<StateSpec> int_subset = opt.quick ? std::vector<StateSpec>(subset.begin(),
                                                   subset.begin() + std::min<size_t>(subset.size(), 8))
                                                : subset;
  detail::parallel_over(std::max(1, opt.threads), int_subset.size(), [&](size_t i) {
    const StateSpec& spec = int_subset[i];
    double hw = std::abs(beta_parameter(spec)) * std::sqrt(2.0) +
                4.5 * std::exp(spec.r) * std::sqrt(spec.m + 1.0);
    int panels = std::max(3, static_cast<int>(std::ceil(2.0 * hw / 3.0)));
    auto [abs_i, signed_i] = pascs::detail::panel_integrate(
        [&](Complex g) { return wigner_closed(spec, g); }, hw, panels);
    (void)abs_i;
    double err = std::abs(signed_i - 1.0);
    std::lock_guard<std::mutex> lock(mu);
    integ.record(err, err, kv_string(spec));
  });
  res.deviations.push_back(integ.finish());

  // center-sign alternation with m parity (added photons)
  bool parity_ok = true;
  std::string parity_note;
  for (int m = 0; m <= 3; ++m) {
    StateSpec spec(Operation::Add, m, std::polar(0.2, k_two_pi / 6.0), 0.1, 0.0);
    double w0 = wigner_closed(spec, Complex(0, 0));
    bool expect_positive = (m % 2 == 0);
    if ((w0 > 0) != expect_positive) parity_ok = false;
    parity_note += " m=" + std::to_string(m) + ": W(0)=" + format_double(w0);
  }
  res.notes.push_back("center parity:" + parity_note);
  res.deviations.push_back({"wigner center-sign parity", 0, 0, 0, parity_ok, parity_note});

  res.pass = true;
  for (const auto& d : res.deviations) res.pass = res.pass && d.pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 8: nonclassical volume: coherent zero, Fock-|1> analytic value,
// strict growth with added photons, and the 10 s per-evaluation budget.
inline CheckResult check_volume(const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{8, "nonclassical volume"};
  double worst_seconds = 0.0;
  auto timed_delta = [&](const StateSpec& spec) {
    auto s0 = std::chrono::steady_clock::now();
    double d = nonclassical_volume(spec, 1e-6).delta;
    worst_seconds =
        std::max(worst_seconds, std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count());
    return d;
  };

  detail::DeviationTracker coh("delta(coherent) = 0", 1e-6);
  double d_coh = timed_delta(StateSpec(Operation::Add, 0, Complex(1.0, 0.0), 0.0, 0.0));
  coh.record(std::abs(d_coh), std::abs(d_coh), "coherent alpha=1");
  res.deviations.push_back(coh.finish());

  detail::DeviationTracker fock("delta(Fock |1>) = 2 e^{-1/2} - 1", 1e-4);
  double d_fock = timed_delta(StateSpec(Operation::Add, 1, Complex(0.0, 0.0), 0.0, 0.0));
  double expect = 2.0 * std::exp(-0.5) - 1.0;
  fock.record(std::abs(d_fock - expect), std::abs(d_fock - expect), "Fock |1>");
  res.deviations.push_back(fock.finish());

  bool mono_ok = true;
  std::string mono_note;
  if (!opt.quick) {
    double prev = -1.0;
    for (int m = 0; m <= 3; ++m) {
      double d = timed_delta(StateSpec(Operation::Add, m, std::polar(0.2, k_two_pi / 6.0), 0.3, 0.0));
      mono_note += " m=" + std::to_string(m) + ": " + format_double(d);
      if (d <= prev) mono_ok = false;
      prev = d;
    }
    res.notes.push_back("delta growth with m:" + mono_note);
  }
  res.deviations.push_back({"delta strictly increasing in m", 0, 0, 0, mono_ok, mono_note});
  res.deviations.push_back({"delta evaluation <= 10 s", worst_seconds, worst_seconds, 10.0,
                            worst_seconds <= 10.0, "slowest evaluation"});
  res.pass = true;
  for (const auto& d : res.deviations) res.pass = res.pass && d.pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 9: m = 0 add/sub collapse; exact 2*pi periodicity; coincidence of
// sampled witness curves over [0,2pi) and [2pi,4pi).
inline CheckResult check_collapse_periodicity(const VerifyOptions&) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{9, "m=0 collapse and periodicity"};

  detail::DeviationTracker collapse("m=0 add vs sub witness reports", 1e-12);
  for (double r : {0.1, 0.4}) {
    StateSpec sa(Operation::Add, 0, std::polar(0.8, 0.9), r, 1.3);
    StateSpec ss(Operation::Subtract, 0, std::polar(0.8, 0.9), r, 1.3);
    WitnessReport ra = witness_report(sa), rs = witness_report(ss);
    auto cmp = [&](double a, double b, const std::string& what) {
      double err = std::abs(a - b) / std::max(1.0, std::abs(b));
      collapse.record(std::abs(a - b), err, what + " r=" + format_double(r));
    };
    cmp(ra.q_mandel, rs.q_mandel, "Q");
    for (const auto& [n, v] : ra.D) cmp(v, rs.D.at(n), "D" + std::to_string(n - 1));
    for (const auto& [n, v] : ra.d) cmp(v, rs.d.at(n), "d" + std::to_string(n - 1));
    cmp(ra.a3, rs.a3, "A3");
    for (const auto& [n, v] : ra.S) cmp(v, rs.S.at(n), "S" + std::to_string(n));
  }
  res.deviations.push_back(collapse.finish());

  // exact equality at phi values whose +2*pi image is exactly representable
  bool exact_ok = true;
  std::string exact_note;
  for (double base : {0.0, 0.25 * k_two_pi, 0.5 * k_two_pi, 0.75 * k_two_pi}) {
    StateSpec s1(Operation::Add, 2, std::polar(0.7, 0.4), 0.35, base);
    StateSpec s2(Operation::Add, 2, std::polar(0.7, 0.4), 0.35, base + k_two_pi);
    MomentTable t1(s1), t2(s2);
    for (int n : {2, 3}) {
      double a = hoa(t1, n), b = hoa(t2, n);
      if (a != b) {
        exact_ok = false;
        exact_note = "phi=" + format_double(base) + " D order " + std::to_string(n);
      }
    }
    if (hong_mandel(s1, t1, 2) != hong_mandel(s2, t2, 2)) exact_ok = false;
  }
  res.deviations.push_back({"value(phi) == value(phi + 2pi) exactly", 0, 0, 0, exact_ok, exact_note});

  detail::DeviationTracker curves("witness curves repeat over [2pi,4pi)", 1e-12);
  for (int i = 0; i < 16; ++i) {
    double phi = k_two_pi * i / 16.0;
    StateSpec s1(Operation::Subtract, 1, std::polar(0.8, 0.5), 0.3, phi);
    StateSpec s2(Operation::Subtract, 1, std::polar(0.8, 0.5), 0.3, phi + k_two_pi);
    MomentTable t1(s1), t2(s2);
    for (int n : {2, 3}) {
      double a = hoa(t1, n), b = hoa(t2, n);
      curves.record(std::abs(a - b), std::abs(a - b) / std::max(1.0, std::abs(b)),
                    "phi=" + format_double(phi));
    }
  }
  res.deviations.push_back(curves.finish());
  res.pass = res.deviations[0].pass && exact_ok && res.deviations[2].pass;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Criterion 10: figure-level sign structure: D(1), D(2) negative for small r
// after photon addition, and d(2) catching nonclassicality at r where d(1)
// has lost it.
inline CheckResult check_sign_structure(const VerifyOptions&) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res{10, "figure-level sign checks"};
  const Complex a_main = std::polar(std::sqrt(2.0 / 3.0), k_two_pi / 6.0);

  bool neg_ok = true;
  std::string neg_note;
  for (int m = 1; m <= 3; ++m)
    for (double r : {0.05, 0.1}) {
      MomentTable table(StateSpec(Operation::Add, m, a_main, r, 0.0));
      double d1 = hoa(table, 2), d2 = hoa(table, 3);
      if (!(d1 < 0.0 && d2 < 0.0)) {
        neg_ok = false;
        neg_note += " FAIL m=" + std::to_string(m) + " r=" + format_double(r);
      }
    }
  res.deviations.push_back({"D(1), D(2) < 0 for added photons at small r", 0, 0, 0, neg_ok, neg_note});

  bool cross_ok = true;
  std::string cross_note;
  for (int m = 1; m <= 3; ++m) {
    bool found = false;
    for (int i = 1; i <= 80 && !found; ++i) {
      double r = 0.01 + (2.0 - 0.01) * i / 80.0;
      MomentTable table(StateSpec(Operation::Add, m, a_main, r, 0.0));
      double d1 = hosps(table, 2), d2 = hosps(table, 3);
      if (d2 < 0.0 && d1 >= 0.0) {
        found = true;
        cross_note += " m=" + std::to_string(m) + ": r=" + format_double(r);
      }
    }
    if (!found) {
      cross_ok = false;
      cross_note += " m=" + std::to_string(m) + ": none";
    }
  }
  res.notes.push_back("d(2)<0<=d(1) crossings:" + cross_note);
  res.deviations.push_back({"exists r with d(2) < 0 <= d(1)", 0, 0, 0, cross_ok, cross_note});
  res.pass = neg_ok && cross_ok;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Convention adjudications re-derived at runtime so the report shows why the
// shipped conventions were chosen over their rejected alternatives.
inline std::vector<std::pair<std::string, std::string>> adjudications(detail::OracleCache& cache) {
  std::vector<std::pair<std::string, std::string>> out;

  {  // subtracted-state distribution index: n+m against n-m
    StateSpec spec(Operation::Subtract, 2, std::polar(0.5, k_two_pi / 6.0), 0.4, 0.25 * k_two_pi);
    const auto& bundle = cache.get(spec);
    double dev_plus = 0.0, dev_minus = 0.0;
    for (int n = 0; n <= 20; ++n) {
      double orac = std::norm(bundle.state.amplitudes[n]);
      dev_plus = std::max(dev_plus,
                          std::abs(pascs::detail::pn_general(spec, n,
                                       pascs::detail::SubtractIndexConvention::NPlusM) - orac));
      dev_minus = std::max(dev_minus,
                           std::abs(pascs::detail::pn_general(spec, n,
                                        pascs::detail::SubtractIndexConvention::NMinusM) - orac));
    }
    if (dev_plus > 1e-8 && dev_minus > 1e-8)
      throw erratum_error("subtract distribution: both index conventions fail the oracle (n+m dev " +
                          format_double(dev_plus) + ", n-m dev " + format_double(dev_minus) + ")");
    out.emplace_back("subtract_pnd_index", "n+m (dev " + format_double(dev_plus) +
                                               "); n-m rejected (dev " + format_double(dev_minus) + ")");
  }

  {  // Klyshko middle term: P_{n+1}^2 against P_n^2 on a coherent state
    StateSpec spec(Operation::Add, 0, Complex(1.0, 0.0), 0.0, 0.0);
    auto dist = pnd(spec, 14);
    double with_mid = 0.0, with_pn = 0.0;
    for (int n = 0; n <= 10; ++n) {
      const auto& P = dist.probabilities;
      with_mid = std::max(with_mid, std::abs((n + 2) * P[n] * P[n + 2] - (n + 1) * P[n + 1] * P[n + 1]));
      with_pn = std::max(with_pn, std::abs((n + 2) * P[n] * P[n + 2] - (n + 1) * P[n] * P[n]));
    }
    out.emplace_back("klyshko_middle_term",
                     "(n+1) P_{n+1}^2 (coherent residual " + format_double(with_mid) +
                         "); (n+1) P_n^2 rejected (residual " + format_double(with_pn) + ")");
  }

  {  // squeezed-vacuum subtraction normalization: bracket exponent -1/2
    StateSpec spec(Operation::Subtract, 2, Complex(0.0, 0.0), 0.5, 0.0);
    double general = normalization(spec);
    double with_exp = normalization_reductions(spec);
    Complex is = Complex(0.0, 1.0) * std::sinh(spec.r);
    double no_exp = (combinatorics().factorial_d(2) * std::pow(-is, 2) * legendre(2, is)).real();
    out.emplace_back("subtract_vacuum_norm_exponent",
                     "bracket^{-1/2} (dev " + format_double(std::abs(with_exp - general)) +
                         "); bracket alone rejected (dev " +
                         format_double(std::abs(no_exp - general)) + ")");
  }

  {  // moment phase convention: conjugated form against the raw variant
    StateSpec spec(Operation::Add, 0, std::polar(0.9, 0.8), 0.35, 1.1);
    const auto& bundle = cache.get(spec);
    Complex target = oracle::oracle_moment(bundle.state, 1, 0);  // <a†> = alpha*
    Complex chosen = moment(spec, 1, 0);
    Complex raw_variant = std::conj(chosen);  // the unconjugated scalar
    out.emplace_back("moment_phase_convention",
                     "e^{-i phi (p-q)/2} i^p (-i)^q with H(A*) H(A) (dev " +
                         format_double(std::abs(chosen - target)) +
                         "); conjugate variant rejected (dev " +
                         format_double(std::abs(raw_variant - target)) + ")");
  }

  out.emplace_back("hong_mandel_weight",
                   "t_{2i} = (2i)!/(2^i i!) (validated against oracle quadrature moments)");
  return out;
}

inline VerifyReport run_verify(const VerifyOptions& options) {
  VerifyOptions opt = options;
  if (opt.threads <= 0) opt.threads = std::max(1u, std::thread::hardware_concurrency());
  VerifyReport report;
  auto grid = detail::acceptance_grid(opt.quick);
  report.grid_description =
      std::string(opt.quick ? "quick" : "full") + " grid: " + std::to_string(grid.size()) +
      " states (alpha x r x phi x m x op), orders p,q <= " + (opt.quick ? "2" : "4");
  detail::OracleCache cache(opt.threads);
  cache.prebuild(grid);

  report.checks.push_back(check_moments(grid, cache, opt));
  report.checks.push_back(check_normalization(grid, cache, opt));
  report.checks.push_back(check_distributions(grid, cache, opt));
  report.checks.push_back(check_klyshko(opt));
  report.checks.push_back(check_agarwal(grid, cache, opt));
  report.checks.push_back(check_hong_mandel(grid, cache, opt));
  report.checks.push_back(check_wigner(grid, cache, opt));
  report.checks.push_back(check_volume(opt));
  report.checks.push_back(check_collapse_periodicity(opt));
  report.checks.push_back(check_sign_structure(opt));
  report.adjudications = adjudications(cache);

  report.pass = true;
  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

inline void print_report(const VerifyReport& report, std::ostream& os) {
  os << "verification grid: " << report.grid_description << "\n\n";
  for (const auto& check : report.checks) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", check.seconds);
    os << (check.pass ? "[PASS] " : "[FAIL] ") << "criterion " << check.criterion << ": "
       << check.name << " (" << secs << " s)\n";
    for (const auto& dev : check.deviations) {
      os << "    " << (dev.pass ? "ok   " : "FAIL ") << dev.quantity << ": max abs "
         << format_double(dev.max_abs) << ", max rel " << format_double(dev.max_rel);
      if (dev.tolerance > 0.0) os << " (tol " << format_double(dev.tolerance) << ")";
      if (!dev.pass && !dev.worst_case.empty()) os << "  worst: " << dev.worst_case;
      os << "\n";
    }
  }
  os << "\nadjudicated conventions:\n";
  for (const auto& [name, detail] : report.adjudications)
    os << "    " << name << ": " << detail << "\n";
  os << "\noverall: " << (report.pass ? "PASS" : "FAIL") << "\n";
}

}  // namespace pascs::verify
