#include <catch_amalgamated.hpp>

#include "schro/evolve.hpp"
#include "schro/fourier_xi.hpp"

#include <cmath>
#include <random>

using namespace schro;
using Catch::Approx;

TEST_CASE("xi-grid layout", "[fourier_xi]") {
  const XiGrid g = XiGrid::with_spacing(80.0, 5.0 / 16.0);
  CHECK(g.N == 512);
  CHECK(g.size() == 513);
  CHECK(g.point(0) == -80.0);
  CHECK(g.point(g.N) == Approx(80.0));
  CHECK(g.weights().sum() == Approx(160.0));
  CHECK(g.weight(0) == Approx(0.5 * g.dxi()));
  CHECK_THROWS_AS(XiGrid::with_spacing(1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(XiGrid(0.0, 4), ConfigError);
}

TEST_CASE("Cauchy-kernel initial data", "[fourier_xi]") {
  CVector u0(2);
  u0 << Complex(1.0, 0.0), Complex(-2.0, 1.0);
  const XiGrid g(4.0, 8);
  const WarpedStateXi s = init_xi_state(u0, g);
  CHECK((s.data.col(4) - u0 / kPi).norm() < 1e-15);
  for (Index j = 0; j <= 8; ++j) CHECK((s.data.col(j) - s.data.col(8 - j)).norm() < 1e-15);
}

TEST_CASE("trapezoid mass of the Cauchy kernel", "[fourier_xi]") {
  const XiGrid g = XiGrid::with_spacing(320.0, 5.0 / 16.0);
  const WarpedStateXi s = init_xi_state(CVector::Ones(1), g);
  const double mass = (s.data.row(0).transpose().array() * g.weights().array().cast<Complex>()).sum().real();
  const double exact = 2.0 * std::atan(320.0) / kPi;
  CHECK(mass == Approx(exact).epsilon(1e-4));
  CHECK(1.0 - mass == Approx(2.0 / (kPi * 320.0)).epsilon(1e-2));
}

TEST_CASE("reconstruction at t = 0", "[fourier_xi]") {
  const XiGrid g = XiGrid::with_spacing(320.0, 5.0 / 16.0);
  CVector u0(1);
  u0 << 2.0;
  const WarpedStateXi s = init_xi_state(u0, g);
  const double tail = 2.0 / (kPi * 320.0) * 2.0;
  CHECK(std::abs(reconstruct_whc(s, 0.0)(0) - 2.0) <= tail * 1.05);
  for (double p : {-1.5, 0.7, 3.0}) {
    CHECK(std::abs(reconstruct_whc(s, p)(0) - 2.0 * std::exp(-std::abs(p))) < 5e-3);
  }
}

TEST_CASE("xi blocks", "[fourier_xi]") {
  std::mt19937 rng(5);
  std::normal_distribution<double> d;
  const HermitianPair scalar{CMatrix::Constant(1, 1, -1.0), CMatrix::Zero(1, 1)};
  CHECK(xi_mode_hamiltonian(scalar, 2.5)(0, 0).real() == -2.5);
  CMatrix a(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) a(i, j) = Complex(d(rng), d(rng));
  const HermitianPair pair = hermitian_decompose(a);
  CHECK((xi_mode_hamiltonian(pair, 0.0) - pair.H2).norm() == 0.0);
  const XiGrid g(2.0, 4);
  const BlockFamily fam = xi_block_family([pair](Real) { return pair; }, g, false);
  for (Index j = 0; j < g.size(); ++j) {
    const CMatrix dense = g.point(j) * pair.H1 + pair.H2;
    CHECK((fam.block(j, 0.0) + dense).norm() < 1e-14);
    CHECK(detail::is_hermitian(fam.block(j, 0.0)));
  }
}

TEST_CASE("scalar decay through the xi representation", "[fourier_xi]") {
  // A = -1: w(t, p) = e^{-|p + t|}.
  const XiGrid g = XiGrid::with_spacing(320.0, 5.0 / 64.0);
  WarpedStateXi s = init_xi_state(CVector::Ones(1), g);
  const HermitianPair pair{CMatrix::Constant(1, 1, -1.0), CMatrix::Zero(1, 1)};
  StepperConfig cfg;
  cfg.dt = 1.0;
  cfg.scheme = Scheme::ExpmOracle;
  evolve_modes(xi_block_family([pair](Real) { return pair; }, g, false), s, 1.0, cfg);
  CHECK(std::abs(reconstruct_whc(s, 2.0)(0) - std::exp(-3.0)) < 2e-3);
}

TEST_CASE("error model in X and dxi", "[fourier_xi][property]") {
  const HermitianPair pair{CMatrix::Constant(1, 1, -1.0), CMatrix::Zero(1, 1)};
  auto error = [&](double X, double dxi) {
    const XiGrid g = XiGrid::with_spacing(X, dxi);
    WarpedStateXi s = init_xi_state(CVector::Ones(1), g);
    StepperConfig cfg;
    cfg.dt = 1.0;
    cfg.scheme = Scheme::ExpmOracle;
    evolve_modes(xi_block_family([pair](Real) { return pair; }, g, false), s, 1.0, cfg);
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double p = 1.0 + (i + 0.5) / 64.0;
      acc += std::norm(std::exp(p) * reconstruct_whc(s, p)(0) - std::exp(-1.0));
    }
    return std::sqrt(acc / 64.0) / std::exp(-1.0);
  };
  // Quadrature part, at X large enough that truncation is negligible.
  const double e1 = error(2000.0, 1.0), e2 = error(2000.0, 0.5);
  const double order_dxi = std::log2(e1 / e2);
  CHECK(order_dxi > 1.7);
  // Truncation part, with X dxi^2 held fixed.
  const double t1 = error(40.0, 1.0 / 8.0), t2 = error(160.0, 1.0 / 16.0);
  const double order_x = std::log(t1 / t2) / std::log(4.0);
  CHECK(order_x > 0.8);
}

TEST_CASE("integral of the reconstruction", "[fourier_xi]") {
  const XiGrid g = XiGrid::with_spacing(320.0, 5.0 / 64.0);
  const WarpedStateXi s = init_xi_state(CVector::Ones(1), g);
  // e^p * int_p^inf e^{-q} dq = 1
  for (double p : {0.0, 1.0, 2.0}) {
    CHECK(std::abs(std::exp(p) * integrate_whc(s, p)(0) - 1.0) < 2e-2);
  }
  CHECK_THROWS_AS(integrate_whc(s, 1e3), DomainError);
}
