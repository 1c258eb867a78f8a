#pragma once

// Continuous Fourier transform in p: every xi-node carries an independent
// n-vector. The Cauchy kernel 1/(pi(1+xi^2)) is the transform of e^{-|p|}.

#include "schro/core.hpp"
#include "schro/spectral_p.hpp"
#include "schro/system_model.hpp"

#include <cmath>

namespace schro {

struct XiGrid {
  Real X = 1.0;
  Index N = 0;

  XiGrid() = default;
  XiGrid(Real X_, Index N_) : X(X_), N(N_) {
    if (!(X > 0.0)) throw ConfigError("XiGrid: X must be positive");
    if (N <= 0) throw ConfigError("XiGrid: N must be positive");
  }

  /// Grid with spacing dxi; 2X/dxi must be (close to) an integer.
  static XiGrid with_spacing(Real X, Real dxi) {
    if (!(dxi > 0.0)) throw ConfigError("XiGrid: spacing must be positive");
    const Real ratio = 2.0 * X / dxi;
    const Real rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio) {
      throw ConfigError("XiGrid: 2X/dxi must be an integer");
    }
    return XiGrid(X, static_cast<Index>(rounded));
  }

  Index size() const { return N + 1; }
  Real dxi() const { return 2.0 * X / static_cast<Real>(N); }
  Real point(Index j) const { return -X + static_cast<Real>(j) * dxi(); }
  Real weight(Index j) const { return (j == 0 || j == N) ? 0.5 * dxi() : dxi(); }
  RVector points() const {
    RVector x(size());
    for (Index j = 0; j < size(); ++j) x(j) = point(j);
    return x;
  }
  RVector weights() const {
    RVector w(size());
    for (Index j = 0; j < size(); ++j) w(j) = weight(j);
    return w;
  }
};

struct WarpedStateXi {
  XiGrid grid;
  CMatrix data;  // n x (N+1), column j = transformed state at xi_j
  Real t = 0.0;
  Real log_scale = 0.0;

  Index dim() const { return data.rows(); }
};

inline WarpedStateXi init_xi_state(const CVector& u0, const XiGrid& grid,
                                   Real log_scale = 0.0) {
  WarpedStateXi s;
  s.grid = grid;
  s.data.resize(u0.size(), grid.size());
  for (Index j = 0; j < grid.size(); ++j) {
    const Real xi = grid.point(j);
    s.data.col(j) = u0 / (kPi * (1.0 + xi * xi));
  }
  s.log_scale = log_scale;
  return s;
}

/// xi H1 + H2. The transformed equation reads d/dt w_j = +i(xi_j H1 + H2) w_j.
inline CMatrix xi_mode_hamiltonian(const HermitianPair& pair, Real xi) {
  return xi * pair.H1 + pair.H2;
}

/// Blocks in the -i convention used by the stepper: -(xi_j H1 + H2).
inline BlockFamily xi_block_family(std::function<HermitianPair(Real)> pair_at,
                                   const XiGrid& grid, bool time_dependent) {
  BlockFamily fam;
  fam.pair_at = std::move(pair_at);
  fam.coeff = -grid.points();
  fam.h2_coeff = -1.0;
  fam.time_dependent = time_dependent;
  return fam;
}

/// Trapezoid inverse transform sum_j weight_j w_j e^{-i xi_j p}.
inline CVector reconstruct_whc(const WarpedStateXi& state, Real p) {
  const XiGrid& g = state.grid;
  CVector kernel(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    kernel(j) = g.weight(j) * std::exp(-kI * g.point(j) * p);
  }
  return state.data * kernel;
}

/// Exact integral over [p, pi/dxi] of the trapezoid reconstruction. The
/// reconstruction is 2pi/dxi-periodic in p, so the upper limit sits half a
/// period away; its aliased tail cancels the truncated one to leading order.
inline CVector integrate_whc(const WarpedStateXi& state, Real p) {
  const XiGrid& g = state.grid;
  const Real upper = kPi / g.dxi();
  if (p > upper) throw DomainError("integrate_whc: p beyond half the alias period");
  CVector kernel(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    const Real xi = g.point(j);
    Complex v;
    if (std::abs(xi) < 1e-300) {
      v = Complex(upper - p, 0.0);
    } else {
      v = (std::exp(-kI * xi * p) - std::exp(-kI * xi * upper)) / (kI * xi);
    }
    kernel(j) = g.weight(j) * v;
  }
  return state.data * kernel;
}

}  // namespace schro
