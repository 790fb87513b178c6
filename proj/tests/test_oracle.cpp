#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pascs/oracle.hpp"

using namespace pascs;
using namespace pascs::oracle;

TEST_CASE("matrix_exponential: zero and diagonal matrices") {
  OperatorMatrix z{Eigen::MatrixXcd::Zero(6, 6), OperatorKind::Custom};
  auto ez = matrix_exponential(z);
  CHECK((ez.mat - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d(0, 0) = Complex(0.3, 0.0);
  d(1, 1) = Complex(-1.2, 0.5);
  d(2, 2) = Complex(0.0, 2.0);
  d(3, 3) = Complex(4.0, -3.0);
  auto ed = matrix_exponential({d, OperatorKind::Custom});
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(ed.mat(i, i) - std::exp(d(i, i))) < 1e-13 * std::abs(std::exp(d(i, i))));
}

TEST_CASE("matrix_exponential: antihermitian generator gives a unitary") {
  int n = 24;
  OperatorMatrix a = annihilate_op(n);
  Eigen::MatrixXcd gen = Complex(0.0, 0.4) * (a.mat + a.mat.adjoint());
  auto u = matrix_exponential({gen, OperatorKind::Custom});
  Eigen::MatrixXcd should_be_id = u.mat.adjoint() * u.mat;
  CHECK((should_be_id - Eigen::MatrixXcd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("displace/squeeze operators are unitary away from the edge") {
  int n = 48;
  auto d = displace_op(Complex(0.7, -0.4), n);
  auto s = squeeze_op(Complex(0.3, 0.2), n);
  CHECK(d.label == OperatorKind::Displace);
  CHECK(s.label == OperatorKind::Squeeze);
  // columns well inside the basis are orthonormal
  Eigen::MatrixXcd dd = d.mat.adjoint() * d.mat;
  Eigen::MatrixXcd ss = s.mat.adjoint() * s.mat;
  for (int i = 0; i <= n / 2; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      Complex want = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(dd(i, j) - want) < 1e-10);
      CHECK(std::abs(ss(i, j) - want) < 1e-10);
    }
}

TEST_CASE("displaced vacuum reproduces Poisson amplitudes") {
  for (double mod : {0.5, 1.3, 2.0}) {
    Complex alpha = std::polar(mod, 0.8);
    StateSpec spec(Operation::Add, 0, alpha, 0.0, 0.0);
    auto res = build_state(spec, 96);
    CHECK(res.prenorm2 == Catch::Approx(1.0).margin(1e-10));
    for (int n = 0; n <= 20; ++n) {
      double logmag = -0.5 * std::norm(alpha) + n * std::log(mod);
      double fac = 1.0;
      for (int j = 2; j <= n; ++j) fac *= j;
      Complex want = std::exp(logmag) / std::sqrt(fac) * std::polar(1.0, 0.8 * n);
      CHECK(std::abs(res.state.amplitudes[n] - want) < 1e-10);
    }
  }
  // same amplitudes through the dense displacement matrix
  auto d = displace_op(Complex(0.9, 0.2), 64);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(65);
  vac(0) = 1.0;
  Eigen::VectorXcd disp = d.mat * vac;
  auto res = build_state(StateSpec(Operation::Add, 0, Complex(0.9, 0.2), 0.0, 0.0), 64);
  for (int n = 0; n <= 30; ++n) CHECK(std::abs(disp(n) - res.state.amplitudes[n]) < 1e-10);
}

TEST_CASE("squeezed vacuum has exactly zero odd amplitudes") {
  auto res = build_state(StateSpec(Operation::Add, 0, Complex(0, 0), 0.6, 1.1), 80);
  for (int n = 1; n <= 79; n += 2) CHECK(std::abs(res.state.amplitudes[n]) < 1e-14);
  // mean photon number sinh^2 r
  double want = std::pow(std::sinh(0.6), 2);
  CHECK(oracle_moment(res.state, 1, 1).real() == Catch::Approx(want).epsilon(1e-9));
}

TEST_CASE("build_state: pinned small cases") {
  auto vac = build_state(StateSpec(Operation::Add, 0, Complex(0, 0), 0.0, 0.0), 32);
  CHECK(std::abs(vac.state.amplitudes[0] - Complex(1, 0)) < 1e-14);
  auto one = build_state(StateSpec(Operation::Add, 1, Complex(0, 0), 0.0, 0.0), 32);
  CHECK(std::abs(one.state.amplitudes[1] - Complex(1, 0)) < 1e-14);
  CHECK(one.prenorm2 == Catch::Approx(1.0).margin(1e-12));  // a†|0> has norm 1
  CHECK_THROWS_AS(build_state(StateSpec(Operation::Subtract, 1, Complex(0, 0), 0.0, 0.0), 32),
                  degenerate_state_error);
}

TEST_CASE("oracle_moment: coherent and Fock pinned values") {
  auto coh = build_state(StateSpec(Operation::Add, 0, Complex(1.0, 0.0), 0.0, 0.0), 64);
  CHECK(std::abs(oracle_moment(coh.state, 2, 1) - Complex(1.0, 0.0)) < 1e-9);
  auto fock2 = build_state(StateSpec(Operation::Add, 2, Complex(0, 0), 0.0, 0.0), 32);
  CHECK(oracle_moment(fock2.state, 1, 1).real() == Catch::Approx(2.0).margin(1e-12));
  // photon-added coherent state, m=1, alpha=1: <n> = 5/2
  auto pacs = build_state(StateSpec(Operation::Add, 1, Complex(1.0, 0.0), 0.0, 0.0), 64);
  CHECK(oracle_moment(pacs.state, 1, 1).real() == Catch::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("oracle_moment: Hermitian symmetry and accuracy guard") {
  auto res = build_state(StateSpec(Operation::Subtract, 1, std::polar(0.9, 0.7), 0.5, 1.9), 128);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) {
      Complex a = oracle_moment(res.state, p, q);
      Complex b = std::conj(oracle_moment(res.state, q, p));
      CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
  CHECK_THROWS_AS(oracle_moment(res.state, 40, 40), bounds_error);
}

TEST_CASE("oracle_quadrature_moment: vacuum and squeezed values") {
  auto vac = build_state(StateSpec(Operation::Add, 0, Complex(0, 0), 0.0, 0.0), 32);
  CHECK(oracle_quadrature_moment(vac.state, 2) == Catch::Approx(0.5).margin(1e-12));
  CHECK(oracle_quadrature_moment(vac.state, 4) == Catch::Approx(0.75).margin(1e-12));
  auto sq = build_state(StateSpec(Operation::Add, 0, Complex(0, 0), 0.5, 0.5 * k_two_pi), 96);
  CHECK(oracle_quadrature_moment(sq.state, 2) ==
        Catch::Approx(std::exp(-1.0) / 2.0).epsilon(1e-9));
  CHECK_THROWS_AS(oracle_quadrature_moment(vac.state, 3), argument_error);
}

TEST_CASE("oracle_wigner: coherent peak, Fock dip, and the guard") {
  auto coh = build_state(StateSpec(Operation::Add, 0, std::polar(0.8, 1.1), 0.0, 0.0), 64);
  CHECK(oracle_wigner(coh.state, std::polar(0.8, 1.1)) ==
        Catch::Approx(2.0 / k_pi).epsilon(1e-9));
  auto fock1 = build_state(StateSpec(Operation::Add, 1, Complex(0, 0), 0.0, 0.0), 48);
  CHECK(oracle_wigner(fock1.state, Complex(0, 0)) == Catch::Approx(-2.0 / k_pi).epsilon(1e-9));
  CHECK_THROWS_AS(oracle_wigner(fock1.state, Complex(40.0, 0.0)), bounds_error);
}

TEST_CASE("oracle_wigner: negative at origin after one photon addition") {
  StateSpec spec(Operation::Add, 1, std::polar(0.2, k_two_pi / 6.0), 0.1, 0.0);
  auto res = build_state(spec, default_cutoff(spec));
  CHECK(oracle_wigner(res.state, Complex(0, 0)) < 0.0);
}

TEST_CASE("doubling the cutoff leaves observables unchanged") {
  StateSpec spec(Operation::Add, 2, std::polar(1.0, 0.4), 0.6, 2.0);
  int n0 = default_cutoff(spec);
  auto a = build_state(spec, n0);
  auto b = build_state(spec, 2 * n0);
  CHECK(std::abs(a.prenorm2 - b.prenorm2) / b.prenorm2 < 1e-10);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q)
      CHECK(std::abs(oracle_moment(a.state, p, q) - oracle_moment(b.state, p, q)) <
            1e-10 * std::max(1.0, std::abs(oracle_moment(b.state, p, q))));
  CHECK_FALSE(a.truncation_warning);
}

TEST_CASE("matrix_exponential: scaling depth guard") {
  Eigen::MatrixXcd huge = Eigen::MatrixXcd::Identity(3, 3) * 1e30;
  CHECK_THROWS_AS(matrix_exponential({huge, OperatorKind::Custom}), convergence_error);
  Eigen::MatrixXcd nan_mat = Eigen::MatrixXcd::Zero(2, 2);
  nan_mat(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exponential({nan_mat, OperatorKind::Custom}), argument_error);
}

TEST_CASE("undersized cutoff raises the truncation warning") {
  StateSpec spec(Operation::Add, 0, Complex(2.0, 0.0), 0.0, 0.0);
  auto tight = build_state(spec, 8);
  CHECK(tight.truncation_warning);
  auto roomy = build_state(spec, 96);
  CHECK_FALSE(roomy.truncation_warning);
}

TEST_CASE("expm action agrees with the dense matrix exponential") {
  int n = 40;
  Complex z = std::polar(0.45, 1.3);
  auto dense = squeeze_op(z, n);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(n + 1);
  vac(0) = 1.0;
  Eigen::VectorXcd via_dense = dense.mat * vac;
  auto via_action = build_state(StateSpec(Operation::Add, 0, Complex(0, 0), 0.45, 1.3), n);
  for (int i = 0; i <= n; ++i)
    CHECK(std::abs(via_dense(i) - via_action.state.amplitudes[i]) < 1e-11);
}
