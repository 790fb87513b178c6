#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "pascs/oracle.hpp"
#include "pascs/wigner.hpp"

using namespace pascs;

TEST_CASE("wigner_closed: coherent peak and Fock-limit values") {
  Complex alpha = std::polar(0.9, 0.7);
  StateSpec coh(Operation::Add, 0, alpha, 0.0, 0.0);
  CHECK(wigner_closed(coh, alpha) == Catch::Approx(2.0 / k_pi).epsilon(1e-12));

  // Fock |1> limit: (2/pi)(4|g|^2 - 1) e^{-2|g|^2}
  StateSpec fock1(Operation::Add, 1, Complex(0, 0), 0.0, 0.0);
  for (double rho : {0.0, 0.3, 0.5, 0.8, 1.4}) {
    Complex g(rho, 0.0);
    double want = 2.0 / k_pi * (4.0 * rho * rho - 1.0) * std::exp(-2.0 * rho * rho);
    CHECK(wigner_closed(fock1, g) == Catch::Approx(want).margin(1e-12));
    if (rho < 0.5) CHECK(wigner_closed(fock1, g) < 0.0);
    if (rho > 0.5) CHECK(wigner_closed(fock1, g) > 0.0);
  }
}

TEST_CASE("wigner_closed: center sign alternates with added-photon parity") {
  Complex a = std::polar(0.2, k_two_pi / 6.0);
  CHECK(wigner_closed(StateSpec(Operation::Add, 1, a, 0.1, 0.0), Complex(0, 0)) < 0.0);
  CHECK(wigner_closed(StateSpec(Operation::Add, 2, a, 0.1, 0.0), Complex(0, 0)) > 0.0);
  CHECK(wigner_closed(StateSpec(Operation::Add, 3, a, 0.1, 0.0), Complex(0, 0)) < 0.0);
}

TEST_CASE("wigner_closed matches the displaced-parity oracle") {
  StateSpec spec(Operation::Subtract, 3, std::polar(0.2, k_two_pi / 6.0), 0.1, 0.0);
  auto res = oracle::build_state(spec, std::max(oracle::default_cutoff(spec), 64));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (double x = -3.0; x <= 3.01; x += 0.75)
    for (double p = -3.0; p <= 3.01; p += 0.75) {
      Complex g(x * inv_sqrt2, p * inv_sqrt2);
      CHECK(wigner_closed(spec, g) ==
            Catch::Approx(oracle::oracle_wigner(res.state, g)).margin(1e-7));
    }
}

TEST_CASE("wigner_grid: vacuum positivity, bound, and midpoint integral") {
  StateSpec vac(Operation::Add, 0, Complex(0, 0), 0.0, 0.0);
  auto grid = wigner_grid(vac, 3.0, 61);
  for (double v : grid.values) {
    CHECK(v > 0.0);
    CHECK(v <= 2.0 / k_pi + 1e-9);
  }
  StateSpec spec(Operation::Add, 2, std::polar(0.8, 1.2), 0.5, 0.7);
  double hw = default_grid_halfwidth(spec);
  auto g2 = wigner_grid(spec, hw, 161);
  double dx = (g2.x_max - g2.x_min) / (g2.nx - 1);
  double dp = (g2.p_max - g2.p_min) / (g2.np - 1);
  double integral = 0.0;
  for (double v : g2.values) integral += v;
  integral *= dx * dp / 2.0;  // d^2 gamma = dx dp / 2
  CHECK(integral == Catch::Approx(1.0).margin(0.01));
  double vmax = *std::max_element(g2.values.begin(), g2.values.end());
  CHECK(vmax <= 2.0 / k_pi + 1e-9);
}

TEST_CASE("nonclassical_volume: coherent zero and Fock-|1> analytic value") {
  auto coh = nonclassical_volume(StateSpec(Operation::Add, 0, Complex(1, 0), 0.0, 0.0), 1e-6);
  CHECK(coh.delta == 0.0);
  CHECK(coh.estimated_tail < 1e-6);

  auto fock = nonclassical_volume(StateSpec(Operation::Add, 1, Complex(0, 0), 0.0, 0.0), 1e-6);
  CHECK(fock.delta == Catch::Approx(2.0 * std::exp(-0.5) - 1.0).margin(1e-4));
  CHECK(fock.refinement_levels >= 1);
}

TEST_CASE("nonclassical_volume: grows strictly with added photons") {
  Complex a = std::polar(0.2, k_two_pi / 6.0);
  double prev = -1.0;
  for (int m = 0; m <= 3; ++m) {
    double d = nonclassical_volume(StateSpec(Operation::Add, m, a, 0.3, 0.0), 1e-6).delta;
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("nonclassical_volume: argument checks and periodicity") {
  StateSpec spec(Operation::Add, 1, std::polar(0.2, 0.3), 0.2, 0.25 * k_two_pi);
  CHECK_THROWS_AS(nonclassical_volume(spec, 1e-7), argument_error);
  StateSpec shifted(Operation::Add, 1, std::polar(0.2, 0.3), 0.2, 0.25 * k_two_pi + k_two_pi);
  CHECK(nonclassical_volume(spec, 1e-6).delta == nonclassical_volume(shifted, 1e-6).delta);
}

TEST_CASE("binary grid round-trip preserves everything") {
  StateSpec spec(Operation::Subtract, 1, std::polar(0.4, 0.9), 0.3, 0.2);
  auto grid = wigner_grid(spec, -2.0, 2.5, -1.5, 3.0, 17, 13);
  std::stringstream buf;
  wigner_grid_binary(grid, buf);
  auto back = wigner_grid_from_binary(buf);
  CHECK(back.nx == grid.nx);
  CHECK(back.np == grid.np);
  CHECK(back.x_min == grid.x_min);
  CHECK(back.x_max == grid.x_max);
  CHECK(back.p_min == grid.p_min);
  CHECK(back.p_max == grid.p_max);
  CHECK(back.values == grid.values);
}

TEST_CASE("grid CSV carries the spec record and the convention note") {
  StateSpec spec(Operation::Add, 1, Complex(0.2, 0.1), 0.2, 0.0);
  auto grid = wigner_grid(spec, 1.0, 5);
  std::stringstream ss;
  wigner_grid_csv(grid, ss);
  std::string out = ss.str();
  CHECK(out.find("# op=add m=1") != std::string::npos);
  CHECK(out.find("sqrt(2)") != std::string::npos);
  CHECK(out.find("x,p,W\n") != std::string::npos);
}

TEST_CASE("degenerate subtraction raises everywhere") {
  StateSpec degen(Operation::Subtract, 2, Complex(0, 0), 0.0, 0.0);
  CHECK_THROWS_AS(wigner_closed(degen, Complex(0, 0)), degenerate_state_error);
  CHECK_THROWS_AS(nonclassical_volume(degen, 1e-6), degenerate_state_error);
}
