#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pascs/oracle.hpp"
#include "pascs/states.hpp"

using namespace pascs;

TEST_CASE("phi is stored reduced to [0, 2pi)") {
  StateSpec a(Operation::Add, 0, Complex(1, 0), 0.1, k_two_pi);
  CHECK(a.phi == 0.0);
  StateSpec b(Operation::Add, 0, Complex(1, 0), 0.1, -0.25 * k_two_pi);
  CHECK(b.phi == 0.75 * k_two_pi);
  StateSpec c(Operation::Add, 0, Complex(1, 0), 0.1, 0.5 * k_two_pi + k_two_pi);
  CHECK(c.phi == 0.5 * k_two_pi);
}

TEST_CASE("normalization: pinned values") {
  CHECK(normalization(StateSpec(Operation::Add, 0, std::polar(0.7, 0.4), 0.5, 1.0)) ==
        Catch::Approx(1.0).epsilon(1e-12));
  CHECK(normalization(StateSpec(Operation::Subtract, 3, Complex(2.0, 0.0), 0.0, 0.0)) ==
        Catch::Approx(0.125).epsilon(1e-12));
  CHECK(normalization(StateSpec(Operation::Add, 1, Complex(1.0, 0.0), 0.0, 0.0)) ==
        Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("normalization matches oracle pre-normalization norm") {
  for (Operation op : {Operation::Add, Operation::Subtract}) {
    for (int m : {0, 1, 3}) {
      for (double r : {0.15, 0.6}) {
        StateSpec spec(op, m, std::polar(0.8, 2.1), r, 0.9);
        auto res = oracle::build_state(spec, oracle::default_cutoff(spec));
        double inv_sq = 1.0 / std::pow(normalization(spec), 2);
        CHECK(inv_sq == Catch::Approx(res.prenorm2).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("special-case reductions agree with the general sums") {
  for (int m : {0, 1, 2, 3}) {
    StateSpec add0(Operation::Add, m, Complex(0, 0), 0.4, 0.7);
    CHECK(normalization_reductions(add0) ==
          Catch::Approx(normalization(add0)).epsilon(1e-10));
    StateSpec sub0(Operation::Subtract, m, Complex(0, 0), 0.4, 0.7);
    CHECK(normalization_reductions(sub0) ==
          Catch::Approx(normalization(sub0)).epsilon(1e-10));
    StateSpec addr0(Operation::Add, m, std::polar(0.9, 1.2), 0.0, 0.0);
    CHECK(normalization_reductions(addr0) ==
          Catch::Approx(normalization(addr0)).epsilon(1e-10));
    if (m >= 1) {
      StateSpec subr0(Operation::Subtract, m, std::polar(0.9, 1.2), 0.0, 0.0);
      CHECK(normalization_reductions(subr0) ==
            Catch::Approx(normalization(subr0)).epsilon(1e-10));
    }
  }
  // Legendre reduction against the oracle as well
  StateSpec sub1(Operation::Subtract, 1, Complex(0, 0), 0.5, 0.0);
  auto res = oracle::build_state(sub1, 64);
  CHECK(1.0 / std::pow(normalization_reductions(sub1), 2) ==
        Catch::Approx(res.prenorm2).epsilon(1e-9));
  // explicit Legendre-form value for the added squeezed vacuum
  StateSpec add2(Operation::Add, 2, Complex(0, 0), 0.4, 0.0);
  double want = 1.0 / std::sqrt(2.0 * std::pow(std::cosh(0.4), 2) *
                                legendre(2, Complex(std::cosh(0.4), 0)).real());
  CHECK(normalization(add2) == Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("normalization_reductions rejects generic specs") {
  CHECK_THROWS_AS(normalization_reductions(StateSpec(Operation::Add, 1, Complex(0.5, 0), 0.3, 0.0)),
                  argument_error);
}

TEST_CASE("hermite_argument: values and the limit-branch signal") {
  CHECK(std::abs(hermite_argument(StateSpec(Operation::Add, 0, Complex(0, 0), 0.3, 0.0)).value) ==
        0.0);
  auto a = hermite_argument(StateSpec(Operation::Add, 0, Complex(1, 0), 0.3, 0.0));
  Complex want = Complex(0, 1) / std::sqrt(std::sinh(0.6));
  CHECK(std::abs(a.value - want) < 1e-14);
  CHECK_FALSE(a.regularized);
  auto b = hermite_argument(
      StateSpec(Operation::Add, 0, std::polar(std::sqrt(2.0 / 3.0), k_two_pi / 6.0), 0.1, 0.0));
  CHECK(std::norm(b.value) == Catch::Approx((2.0 / 3.0) / std::sinh(0.2)).epsilon(1e-12));
  CHECK_THROWS_AS(hermite_argument(StateSpec(Operation::Add, 0, Complex(1, 0), 1e-9, 0.0)),
                  argument_error);
}

TEST_CASE("normalization is exactly 2pi-periodic in phi") {
  for (double base : {0.0, 0.25 * k_two_pi, 0.5 * k_two_pi}) {
    StateSpec s1(Operation::Add, 2, std::polar(0.8, 0.3), 0.45, base);
    StateSpec s2(Operation::Add, 2, std::polar(0.8, 0.3), 0.45, base + k_two_pi);
    CHECK(normalization(s1) == normalization(s2));
  }
}

TEST_CASE("N+ and N- coincide at m = 0") {
  StateSpec a(Operation::Add, 0, std::polar(1.1, 0.6), 0.7, 2.2);
  StateSpec s(Operation::Subtract, 0, std::polar(1.1, 0.6), 0.7, 2.2);
  CHECK(normalization(a) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(normalization(s) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("continuity across the r->0 threshold") {
  for (Operation op : {Operation::Add, Operation::Subtract}) {
    for (int m : {1, 2}) {
      StateSpec below(op, m, std::polar(0.8, 1.0), k_epsilon_r * 0.99, 0.3);
      StateSpec above(op, m, std::polar(0.8, 1.0), k_epsilon_r * 1.01, 0.3);
      double lo = normalization(below);
      double hi = normalization(above);
      CHECK(std::abs(lo - hi) <= 1e-6 * std::max(std::abs(lo), std::abs(hi)));
    }
  }
}

TEST_CASE("degenerate subtraction is a first-class error") {
  StateSpec spec(Operation::Subtract, 1, Complex(0, 0), 0.0, 0.0);
  CHECK(spec.degenerate());
  CHECK_THROWS_AS(normalization(spec), degenerate_state_error);
  CHECK_FALSE(StateSpec(Operation::Subtract, 0, Complex(0, 0), 0.0, 0.0).degenerate());
  CHECK_FALSE(StateSpec(Operation::Subtract, 2, Complex(0, 0), 0.5, 0.0).degenerate());
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(StateSpec(Operation::Add, -1, Complex(0, 0), 0.0, 0.0), argument_error);
  CHECK_THROWS_AS(StateSpec(Operation::Add, 0, Complex(0, 0), -0.5, 0.0), argument_error);
}

TEST_CASE("kv record carries the exact field set") {
  StateSpec spec(Operation::Subtract, 2, Complex(0.5, -0.25), 0.3, 1.0);
  auto kv = kv_record(spec);
  REQUIRE(kv.size() == 6);
  CHECK(kv[0].first == "op");
  CHECK(kv[0].second == "sub");
  CHECK(kv[1].first == "m");
  CHECK(kv[2].first == "alpha_re");
  CHECK(kv[3].first == "alpha_im");
  CHECK(kv[4].first == "r");
  CHECK(kv[5].first == "phi");
}
