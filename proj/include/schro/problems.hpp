#pragma once

// Benchmark systems with closed-form (or dense reference) solutions and the
// Schrodingerization parameters that resolve them.

#include "schro/core.hpp"
#include "schro/evolve.hpp"
#include "schro/system_model.hpp"
#include "schro/warping.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace schro {

enum class Discretization { DiscreteFourier, ContinuousFourier };

inline std::string_view to_string(Discretization d) {
  return d == Discretization::DiscreteFourier ? "discrete" : "continuous";
}

struct RecommendedParams {
  Discretization disc = Discretization::DiscreteFourier;
  ProfileKind profile = ProfileKind::SmoothR2;
  Real piL = kPi;
  Index Np = 256;
  Real X = 80.0;
  Real dxi = 5.0 / 8.0;
  Real dt = 1.0 / 256.0;
  Real T = 1.0;
  Real R = 1.0;
  std::optional<Real> gamma;
  std::optional<Real> p_diamond;
};

enum class ReferenceKind { ClosedForm, SemiDiscrete };

struct Experiment {
  std::string name;
  LinearSystem system;
  RVector x;  // spatial nodes of the state components, when meaningful
  Real log_scale = 0.0;  // physical u0 = e^{log_scale} * system.u0
  // Reference u(t) in physical units.
  std::function<CVector(Real)> exact;
  ReferenceKind reference = ReferenceKind::ClosedForm;
  RecommendedParams recommended;
};

namespace detail {

inline CMatrix tridiagonal(Index n, Real diag, Real off) {
  CMatrix a = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = diag;
    if (i + 1 < n) {
      a(i, i + 1) = off;
      a(i + 1, i) = off;
    }
  }
  return a;
}

inline Index interior_count(Real length, Real h, const char* who) {
  const Real cells = length / h;
  const Real rounded = std::round(cells);
  if (!(h > 0.0) || std::abs(cells - rounded) > 1e-9 * cells || rounded < 2) {
    throw ConfigError(std::string(who) + ": spacing must divide the interval");
  }
  return static_cast<Index>(rounded) - 1;
}

}  // namespace detail

/// u_t = u_xx + k^2 u on (0, 2) with homogeneous Dirichlet data.
inline Experiment scattering_system(Real h = 1.0 / 32.0, Real k = 4.0) {
  const Index n = detail::interior_count(2.0, h, "scattering_system");
  Experiment e;
  e.name = "scattering";
  e.x.resize(n);
  CVector u0(n);
  for (Index j = 0; j < n; ++j) {
    e.x(j) = static_cast<Real>(j + 1) * h;
    u0(j) = std::sin(kPi * e.x(j));
  }
  const CMatrix a = detail::tridiagonal(n, -2.0 / (h * h) + k * k, 1.0 / (h * h));
  e.system = LinearSystem::constant(a, u0, 1.0);
  const RVector x = e.x;
  e.exact = [x, k](Real t) {
    CVector u(x.size());
    const Real amp = std::exp((k * k - kPi * kPi) * t);
    for (Index j = 0; j < x.size(); ++j) u(j) = amp * std::sin(kPi * x(j));
    return u;
  };
  e.reference = ReferenceKind::ClosedForm;
  auto& r = e.recommended;
  r.disc = Discretization::ContinuousFourier;
  r.profile = ProfileKind::Exponential;
  r.X = 80.0;
  r.dxi = 5.0 / 16.0;
  r.dt = 1.0 / 32.0;
  r.T = 1.0;
  r.R = 1.0;
  r.piL = 40.0;
  r.Np = 1024;
  // sin(pi x) is an exact eigenvector of the discrete operator, so only its
  // growth rate (about k^2 - pi^2) reaches the recovery region; the larger
  // rate of the unexcited first mode is irrelevant here.
  r.p_diamond = (u0.adjoint() * a * u0)(0).real() / u0.squaredNorm() * r.T;
  return e;
}

/// Exact eigenvalues of the scattering matrix, j = 1..n.
inline RVector scattering_eigenvalues(Real h, Real k) {
  const Index n = detail::interior_count(2.0, h, "scattering_eigenvalues");
  RVector ev(n);
  for (Index j = 1; j <= n; ++j) {
    ev(j - 1) = (-2.0 + 2.0 * std::cos(static_cast<Real>(j) * kPi /
                                        static_cast<Real>(n + 1))) / (h * h) + k * k;
  }
  return ev;
}

/// u_t = -u_xx on (0, 2). The initial data e^{-25 pi^2} sin(pi x / 2) is held
/// as sin(pi x / 2) with log_scale = -25 pi^2.
inline constexpr Real kBackwardHeatLogScale = -25.0 * kPi * kPi;

inline Experiment backward_heat_system(Real dx = 1.0 / 32.0) {
  const Index n = detail::interior_count(2.0, dx, "backward_heat_system");
  Experiment e;
  e.name = "backward-heat";
  e.x.resize(n);
  CVector u0(n);
  for (Index j = 0; j < n; ++j) {
    e.x(j) = static_cast<Real>(j + 1) * dx;
    u0(j) = std::sin(0.5 * kPi * e.x(j));
  }
  const CMatrix a = detail::tridiagonal(n, 2.0 / (dx * dx), -1.0 / (dx * dx));
  e.system = LinearSystem::constant(a, u0, 100.0);
  const RVector x = e.x;
  e.exact = [x](Real t) {
    CVector u(x.size());
    const Real amp = std::exp(0.25 * kPi * kPi * t + kBackwardHeatLogScale);
    for (Index j = 0; j < x.size(); ++j) u(j) = amp * std::sin(0.5 * kPi * x(j));
    return u;
  };
  e.reference = ReferenceKind::ClosedForm;
  e.log_scale = kBackwardHeatLogScale;
  auto& r = e.recommended;
  r.disc = Discretization::DiscreteFourier;
  r.profile = ProfileKind::Exponential;
  r.piL = 257.0;
  r.Np = 1024;
  r.dt = 25.0 / 1024.0;
  r.T = 100.0;
  r.R = 1.0;
  r.p_diamond = 0.25 * kPi * kPi * r.T;
  return e;
}

enum class SourceStrength { Small, Big };

inline Real maxwell_amplitude(SourceStrength s) {
  return s == SourceStrength::Small ? 1.0 : 1000.0;
}

/// 1-D Yee discretization on (0, 1): E at x_i = i h (i = 1..n-1) and B at
/// x_{j+1/2} (j = 0..n-1), driven by a current proportional to t cos(2 pi x).
inline Experiment maxwell_yee_system(Index n = 8, SourceStrength strength = SourceStrength::Small) {
  if (n < 4) throw ConfigError("maxwell_yee_system: need n >= 4 cells");
  const Real h = 1.0 / static_cast<Real>(n);
  const Index ne = n - 1;
  const Index m = ne + n;
  CMatrix dx = CMatrix::Zero(ne, n);
  for (Index i = 0; i < ne; ++i) {
    dx(i, i) = 1.0 / h;
    dx(i, i + 1) = -1.0 / h;
  }
  CMatrix a = CMatrix::Zero(m, m);
  a.topRightCorner(ne, n) = -dx;
  a.bottomLeftCorner(n, ne) = dx.transpose();

  Experiment e;
  e.name = strength == SourceStrength::Small ? "maxwell-small" : "maxwell-big";
  e.x.resize(m);
  for (Index i = 0; i < ne; ++i) e.x(i) = static_cast<Real>(i + 1) * h;
  for (Index j = 0; j < n; ++j) e.x(ne + j) = (static_cast<Real>(j) + 0.5) * h;

  CVector u0 = CVector::Zero(m);
  for (Index i = 0; i < ne; ++i) {
    u0(i) = (std::cos(2.0 * kPi * e.x(i)) - 1.0) / (2.0 * kPi);
  }
  LinearSystem sys = LinearSystem::constant(a, u0, 1.0);
  const Real amp = maxwell_amplitude(strength);
  const RVector xs = e.x;
  sys.b = [xs, ne, amp](Real t) {
    CVector b = CVector::Zero(xs.size());
    for (Index i = 0; i < ne; ++i) b(i) = amp * 2.0 * kPi * t * std::cos(2.0 * kPi * xs(i));
    return b;
  };
  e.system = sys;
  // The source breaks the closed form for the big amplitude and the closed
  // form carries an O(h^2) spatial error anyway, so the reference is the
  // semi-discrete solution.
  e.exact = [sys](Real t) { return expm_oracle(sys, t); };
  e.reference = ReferenceKind::SemiDiscrete;

  auto& r = e.recommended;
  r.disc = Discretization::DiscreteFourier;
  r.profile = ProfileKind::SmoothR2;
  r.piL = kPi;
  r.Np = 256;
  r.dt = 1.0 / 256.0;
  r.X = 80.0;
  r.dxi = 5.0 / 8.0;
  r.T = 1.0;
  r.R = 1.0;
  r.gamma = strength == SourceStrength::Small ? 0.1 : 1e-4;
  r.p_diamond = 0.5;
  return e;
}

/// Continuum solution of the small-source problem sampled on the Yee nodes.
inline CVector maxwell_closed_form(const Experiment& e, Real t) {
  const Index m = e.x.size();
  const Index ne = (m - 1) / 2;
  CVector u(m);
  for (Index i = 0; i < ne; ++i) u(i) = (std::cos(2.0 * kPi * e.x(i)) - 1.0) / (2.0 * kPi);
  for (Index j = ne; j < m; ++j) u(j) = -t * std::sin(2.0 * kPi * e.x(j));
  return u;
}

inline std::vector<std::string> experiment_names() {
  return {"scattering", "backward-heat", "maxwell-small", "maxwell-big"};
}

inline Experiment make_experiment(const std::string& name, Index maxwell_n = 8) {
  if (name == "scattering") return scattering_system();
  if (name == "backward-heat") return backward_heat_system();
  if (name == "maxwell-small") return maxwell_yee_system(maxwell_n, SourceStrength::Small);
  if (name == "maxwell-big") return maxwell_yee_system(maxwell_n, SourceStrength::Big);
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace schro
