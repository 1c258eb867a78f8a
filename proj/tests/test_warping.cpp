#include <catch_amalgamated.hpp>

#include "schro/warping.hpp"

#include <cmath>

using namespace schro;
using Catch::Approx;

TEST_CASE("smooth profile values at the joints", "[warping]") {
  CHECK(smooth_profile_r2(0.0) == 1.0);
  CHECK(smooth_profile_r2(-1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(smooth_profile_r2(-0.5) > 0.0);
}

TEST_CASE("smooth profile one-sided derivatives match e^{-|p|}", "[warping]") {
  const double h = 1e-7;
  const double d0 = (smooth_profile_r2(0.0) - smooth_profile_r2(-h)) / h;
  CHECK(d0 == Approx(-1.0).margin(1e-5));
  const double d1 = (smooth_profile_r2(-1.0 + h) - smooth_profile_r2(-1.0)) / h;
  CHECK(d1 == Approx(std::exp(-1.0)).margin(1e-5));
}

TEST_CASE("derivative jumps vanish at first order", "[warping][property]") {
  auto jump = [](double p, double h) {
    const double left = (smooth_profile_r2(p) - smooth_profile_r2(p - h)) / h;
    const double right = (smooth_profile_r2(p + h) - smooth_profile_r2(p)) / h;
    return std::abs(right - left);
  };
  for (double p : {0.0, -1.0}) {
    const double j1 = jump(p, 1e-3);
    const double j2 = jump(p, 5e-4);
    CHECK(j1 < 1e-2);
    CHECK(j2 / j1 == Approx(0.5).margin(0.05));
  }
  // The exponential profile keeps its kink at 0.
  const double h = 1e-4;
  const double kink = (exponential_profile(h) - 2 * exponential_profile(0) + exponential_profile(-h)) / h;
  CHECK(std::abs(kink) == Approx(2.0).margin(1e-3));
}

TEST_CASE("recovery identity for p >= 0", "[warping][property]") {
  for (ProfileKind k : {ProfileKind::Exponential, ProfileKind::SmoothR2}) {
    const WarpProfile prof{k};
    for (double p = 0.0; p < 30.0; p += 0.37) {
      CHECK(prof(p) * std::exp(p) == Approx(1.0).epsilon(1e-14));
    }
  }
  const WarpProfile e{ProfileKind::Exponential};
  CHECK(e(-2.5) == Approx(std::exp(-2.5)));
  CHECK(e.order() == 1);
  CHECK(WarpProfile{ProfileKind::SmoothR2}.order() == 2);
}

TEST_CASE("domain sizing with vanishing bounds", "[warping]") {
  SpectralBounds b;
  const DomainSizing s = size_domains(b, 1.0, 1.0, 1e-6, false);
  CHECK(s.piL == Approx(std::log(1e6) + 1.0));
  CHECK(s.X == 1e6);
}

TEST_CASE("domain sizing meets both inequalities", "[warping][property]") {
  for (double lp : {0.0, 0.5, 6.1}) {
    for (double lm : {0.0, 3.0, 4000.0}) {
      for (bool inh : {false, true}) {
        SpectralBounds b;
        b.lambda_plus = lp;
        b.lambda_minus = lm;
        const double T = 1.3, R = 1.5, eps = 1e-4;
        const DomainSizing s = size_domains(b, T, R, eps, inh);
        const double m = inh ? 1.0 : 0.0;
        const double e1 = std::exp(-s.piL + 2 * lp * T + R + m);
        const double e2 = std::exp(-s.piL + lm * T + lp * T + R + m);
        CHECK(e1 <= eps * (1 + 1e-12));
        CHECK(e2 <= eps * (1 + 1e-12));
        CHECK(std::max(e1, e2) == Approx(eps).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dominant term for a scattering-like spectrum", "[warping]") {
  SpectralBounds b;
  b.lambda_plus = 6.13;
  b.lambda_minus = 16374.0;
  const DomainSizing s = size_domains(b, 1.0, 1.0, 1e-2, false);
  CHECK(s.piL == Approx(16374.0 + 6.13 + 1.0 + std::log(100.0)));
}

TEST_CASE("xi truncation from the accuracy", "[warping]") {
  SpectralBounds b;
  CHECK(size_domains(b, 1.0, 1.0, 1e-2, false).X == 100.0);
  CHECK(size_domains(b, 1.0, 1.0, 0.3, false).X == 4.0);
}

TEST_CASE("sizing rejects bad accuracy and window", "[warping][errors]") {
  SpectralBounds b;
  CHECK_THROWS_AS(size_domains(b, 1.0, 1.0, 1.0, false), InvalidAccuracyError);
  CHECK_THROWS_AS(size_domains(b, 1.0, 1.0, 0.0, false), InvalidAccuracyError);
  CHECK_THROWS_AS(size_domains(b, 1.0, 3.0, 0.1, false), DomainError);
  CHECK_THROWS_AS(size_domains(b, 1.0, 0.5, 0.1, false), DomainError);
}
