#pragma once

// Discrete-Fourier discretization of the warped variable p on the periodic
// domain [-piL, piL).
//
// Basis: phi_l(p) = exp(i mu_l (p + piL)), mu_l = (l - Np/2)/L, l in [Np].
// At the nodes p_k = -piL + k dp the basis reduces to
//   phi_l(p_k) = (-1)^k exp(2 pi i l k / Np),
// so with a standard forward FFT  F[x]_l = sum_k x_k exp(-2 pi i l k / Np)
//   modes:  c_l = F[(-1)^k w_k]_l / Np
//   nodes:  w_k = (-1)^k sum_l c_l exp(2 pi i l k / Np)
// i.e. the centered spectrum is the standard FFT output after a (-1)^k
// modulation, with mode l = Np/2 carrying mu = 0 and l = 0 the Nyquist
// frequency -Np/(2L).
//
// States are stored mode-major: an (n x Np) matrix whose column k is either
// the n-vector w(p_k) or the n-vector coefficient of mode k.

#include "schro/core.hpp"
#include "schro/system_model.hpp"
#include "schro/warping.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace schro {

struct PGrid {
  Real L = 1.0;
  Index Np = 0;

  PGrid() = default;
  PGrid(Real L_, Index Np_) : L(L_), Np(Np_) {
    if (!(L > 0.0)) throw ConfigError("PGrid: L must be positive");
    if (Np <= 0 || Np % 2 != 0) {
      throw ConfigError("PGrid: Np must be a positive even integer");
    }
  }

  static PGrid from_half_width(Real piL, Index Np) { return PGrid(piL / kPi, Np); }

  /// Power-of-two Np with dp <= max_dp on the domain [-piL, piL).
  static PGrid with_spacing(Real piL, Real max_dp) {
    Index np = 2;
    while (2.0 * piL / static_cast<Real>(np) > max_dp) np *= 2;
    return from_half_width(piL, np);
  }

  Real half_width() const { return kPi * L; }
  Real dp() const { return 2.0 * kPi * L / static_cast<Real>(Np); }
  Real point(Index k) const { return -half_width() + static_cast<Real>(k) * dp(); }
  Real freq(Index l) const {
    return (static_cast<Real>(l) - static_cast<Real>(Np / 2)) / L;
  }
  RVector points() const {
    RVector p(Np);
    for (Index k = 0; k < Np; ++k) p(k) = point(k);
    return p;
  }
  RVector freqs() const {
    RVector m(Np);
    for (Index l = 0; l < Np; ++l) m(l) = freq(l);
    return m;
  }
};

enum class Representation { Grid, Mode };

struct WarpedStateDiscrete {
  PGrid grid;
  Representation rep = Representation::Grid;
  CMatrix data;  // n x Np
  Real t = 0.0;
  // Stored values are exp(-log_scale) times the physical ones.
  Real log_scale = 0.0;

  Index dim() const { return data.rows(); }
};

/// Grid-representation state psi(p_k) u0.
inline WarpedStateDiscrete make_discrete_state(const PGrid& grid,
                                               const WarpProfile& profile,
                                               const CVector& u0,
                                               Real log_scale = 0.0) {
  WarpedStateDiscrete s;
  s.grid = grid;
  s.rep = Representation::Grid;
  s.data.resize(u0.size(), grid.Np);
  for (Index k = 0; k < grid.Np; ++k) s.data.col(k) = profile(grid.point(k)) * u0;
  s.log_scale = log_scale;
  return s;
}

namespace detail {

inline void modulate_alternating(CMatrix& m) {
  for (Index k = 1; k < m.cols(); k += 2) m.col(k) = -m.col(k);
}

// Row-wise FFT along the node/mode axis.
inline CMatrix fft_rows(const CMatrix& in, bool inverse) {
  Eigen::FFT<Real> fft;
  fft.SetFlag(Eigen::FFT<Real>::Unscaled);
  const Index n = in.rows();
  const Index np = in.cols();
  CMatrix out(n, np);
  std::vector<Complex> src(static_cast<std::size_t>(np));
  std::vector<Complex> dst;
  for (Index r = 0; r < n; ++r) {
    for (Index k = 0; k < np; ++k) src[static_cast<std::size_t>(k)] = in(r, k);
    if (inverse) {
      fft.inv(dst, src);
    } else {
      fft.fwd(dst, src);
    }
    for (Index k = 0; k < np; ++k) out(r, k) = dst[static_cast<std::size_t>(k)];
  }
  return out;
}

}  // namespace detail

/// (Phi^{-1} (x) I) w: grid values to centered mode coefficients.
inline WarpedStateDiscrete to_mode_space(const WarpedStateDiscrete& state) {
  if (state.rep != Representation::Grid) {
    throw ConfigError("to_mode_space: state is already in mode representation");
  }
  WarpedStateDiscrete out = state;
  CMatrix x = state.data;
  detail::modulate_alternating(x);
  out.data = detail::fft_rows(x, false) / static_cast<Real>(state.grid.Np);
  out.rep = Representation::Mode;
  return out;
}

/// (Phi (x) I) c: centered mode coefficients to grid values.
inline WarpedStateDiscrete from_mode_space(const WarpedStateDiscrete& state) {
  if (state.rep != Representation::Mode) {
    throw ConfigError("from_mode_space: state is already in grid representation");
  }
  WarpedStateDiscrete out = state;
  out.data = detail::fft_rows(state.data, true);
  detail::modulate_alternating(out.data);
  out.rep = Representation::Grid;
  return out;
}

/// Dense Phi with Phi(k, l) = phi_l(p_k). Test and small-problem use only.
inline CMatrix dense_fourier_matrix(const PGrid& grid) {
  CMatrix phi(grid.Np, grid.Np);
  for (Index k = 0; k < grid.Np; ++k) {
    for (Index l = 0; l < grid.Np; ++l) {
      phi(k, l) = std::exp(kI * grid.freq(l) * (grid.point(k) + grid.half_width()));
    }
  }
  return phi;
}

/// Per-mode Hermitian generators for a family of decoupled blocks,
///   block_j(t) = coeff_j * H1(t) + h2_coeff * H2(t) [+ shift_j * I],
/// with every block evolving as d/dt x_j = -i block_j(t) x_j.
struct BlockFamily {
  std::function<HermitianPair(Real)> pair_at;
  RVector coeff;
  Real h2_coeff = -1.0;
  RVector shift;  // empty means no diagonal shift
  bool time_dependent = false;

  Index count() const { return coeff.size(); }

  CMatrix assemble(const HermitianPair& pair, Index j) const {
    CMatrix h = coeff(j) * pair.H1 + h2_coeff * pair.H2;
    if (shift.size() > 0) h.diagonal().array() += shift(j);
    return h;
  }
  CMatrix block(Index j, Real t) const { return assemble(pair_at(t), j); }
};

/// H^d_l = mu_l H1 - H2 for every p-mode; never materialized as the dense
/// (Np n) x (Np n) Kronecker matrix.
inline BlockFamily mode_hamiltonian(std::function<HermitianPair(Real)> pair_at,
                                    const PGrid& grid, bool time_dependent) {
  BlockFamily fam;
  fam.pair_at = std::move(pair_at);
  fam.coeff = grid.freqs();
  fam.h2_coeff = -1.0;
  fam.time_dependent = time_dependent;
  return fam;
}

inline BlockFamily mode_hamiltonian(const HermitianPair& pair, const PGrid& grid) {
  return mode_hamiltonian([pair](Real) { return pair; }, grid, false);
}

/// Trigonometric interpolant sum_l c_l phi_l(p) of a mode-space state.
inline CVector reconstruct_w(const WarpedStateDiscrete& state, Real p) {
  const PGrid& g = state.grid;
  const Real tol = 1e-12 * (1.0 + g.half_width());
  if (p < -g.half_width() - tol || p > g.half_width() + tol) {
    throw DomainError("reconstruct_w: p = " + std::to_string(p) +
                      " lies outside [-piL, piL]");
  }
  if (state.rep == Representation::Grid) {
    return reconstruct_w(to_mode_space(state), p);
  }
  CVector phases(g.Np);
  for (Index l = 0; l < g.Np; ++l) {
    phases(l) = std::exp(kI * g.freq(l) * (p + g.half_width()));
  }
  return state.data * phases;
}

/// Exact integral of the trigonometric interpolant over [p, piL].
inline CVector integrate_w(const WarpedStateDiscrete& state, Real p) {
  if (state.rep == Representation::Grid) return integrate_w(to_mode_space(state), p);
  const PGrid& g = state.grid;
  if (p < -g.half_width() || p > g.half_width()) {
    throw DomainError("integrate_w: p outside [-piL, piL]");
  }
  const Real a = p + g.half_width();
  const Real b = 2.0 * g.half_width();
  CVector weights(g.Np);
  for (Index l = 0; l < g.Np; ++l) {
    const Real mu = g.freq(l);
    if (l == g.Np / 2) {
      weights(l) = Complex(b - a, 0.0);
    } else {
      weights(l) = (std::exp(kI * mu * b) - std::exp(kI * mu * a)) / (kI * mu);
    }
  }
  return state.data * weights;
}

}  // namespace schro
