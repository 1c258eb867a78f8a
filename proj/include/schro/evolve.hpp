#pragma once

// Unitary time stepping of decoupled Hermitian blocks, a dense reference
// integrator for the original (non-unitary) system, and the clock-variable
// dilation that turns a time-dependent generator into a constant one.
//
// Every evolution here follows d/dt x = -i H x.

#include "schro/core.hpp"
#include "schro/fourier_xi.hpp"
#include "schro/spectral_p.hpp"
#include "schro/system_model.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <mutex>

namespace schro {

enum class Scheme { CrankNicolson, ExpmOracle };

struct StepperConfig {
  Real dt = 1e-3;
  Scheme scheme = Scheme::CrankNicolson;
  bool time_dependent = false;
  unsigned threads = detail::default_threads();
};

struct EvolutionReport {
  Index steps = 0;
  Real final_time = 0.0;
  // Largest relative per-mode norm change |(|x(t)| - |x(0)|)| / |x(0)| seen
  // at any step.
  Real max_norm_drift = 0.0;
};

/// One Cayley step (I + i dt/2 H)^{-1} (I - i dt/2 H) w.
inline CVector cn_step(const CMatrix& H, const CVector& w, Real dt) {
  const Index n = H.rows();
  const CMatrix half = Complex(0.0, 0.5 * dt) * H;
  const CMatrix lhs = CMatrix::Identity(n, n) + half;
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  const CVector rhs = w - half * w;
  CVector out = lu.solve(rhs);
  if (!out.allFinite()) throw SolverError("cn_step: linear solve produced non-finite values");
  return out;
}

/// Cayley propagator for a fixed H and step.
inline CMatrix cayley(const CMatrix& H, Real dt) {
  const Index n = H.rows();
  const CMatrix half = Complex(0.0, 0.5 * dt) * H;
  const CMatrix id = CMatrix::Identity(n, n);
  Eigen::PartialPivLU<CMatrix> lu(id + half);
  CMatrix c = lu.solve(id - half);
  if (!c.allFinite()) throw SolverError("cayley: linear solve produced non-finite values");
  return c;
}

inline CMatrix unitary_exp(const CMatrix& H, Real dt) {
  const CMatrix gen = Complex(0.0, -dt) * H;
  return gen.exp();
}

namespace detail {

struct StepPlan {
  Index full = 0;  // steps of length dt
  Real dt = 0.0;
  Real tail = 0.0;  // final shortened step, 0 if none
  Index total() const { return full + (tail > 0.0 ? 1 : 0); }
};

inline StepPlan plan_steps(Real t0, Real T, Real dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (T < t0) throw ConfigError("final time precedes the current time");
  const Real span = T - t0;
  StepPlan plan;
  plan.dt = dt;
  const Real ratio = span / dt;
  const Real rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max<Real>(1.0, ratio)) {
    plan.full = static_cast<Index>(rounded);
  } else {
    plan.full = static_cast<Index>(std::floor(ratio));
    plan.tail = span - static_cast<Real>(plan.full) * dt;
  }
  return plan;
}

inline CMatrix propagator(const CMatrix& H, Real dt, Scheme scheme) {
  return scheme == Scheme::CrankNicolson ? cayley(H, dt) : unitary_exp(H, dt);
}

inline void track_drift(Real initial, Real current, Real& worst) {
  if (initial > 0.0) worst = std::max(worst, std::abs(current - initial) / initial);
}

}  // namespace detail

/// Advances every column of `data` (column j evolved by block j) from t0 to T.
inline EvolutionReport evolve_blocks(const BlockFamily& family, CMatrix& data,
                                     Real t0, Real T, const StepperConfig& cfg) {
  if (data.cols() != family.count()) {
    throw DimensionError("evolve_blocks: state has " + std::to_string(data.cols()) +
                         " modes but the block family has " +
                         std::to_string(family.count()));
  }
  const detail::StepPlan plan = detail::plan_steps(t0, T, cfg.dt);
  EvolutionReport report;
  report.steps = plan.total();
  report.final_time = T;
  if (plan.total() == 0) return report;

  const bool varying = family.time_dependent || cfg.time_dependent;
  const Index modes = family.count();
  std::mutex drift_mutex;

  if (!varying) {
    const HermitianPair pair = family.pair_at(t0);
    detail::parallel_for(modes, cfg.threads, [&](Index begin, Index end) {
      Real worst = 0.0;
      for (Index j = begin; j < end; ++j) {
        const CMatrix h = family.assemble(pair, j);
        const CMatrix step = detail::propagator(h, plan.dt, cfg.scheme);
        CVector x = data.col(j);
        const Real n0 = x.norm();
        for (Index s = 0; s < plan.full; ++s) {
          x = step * x;
          detail::track_drift(n0, x.norm(), worst);
        }
        if (plan.tail > 0.0) {
          x = detail::propagator(h, plan.tail, cfg.scheme) * x;
          detail::track_drift(n0, x.norm(), worst);
        }
        data.col(j) = x;
      }
      std::lock_guard<std::mutex> lock(drift_mutex);
      report.max_norm_drift = std::max(report.max_norm_drift, worst);
    });
    return report;
  }

  // Generators sampled once per step at the step midpoint, shared by all modes.
  std::vector<HermitianPair> pairs;
  std::vector<Real> widths;
  pairs.reserve(static_cast<std::size_t>(plan.total()));
  for (Index s = 0; s < plan.full; ++s) {
    pairs.push_back(family.pair_at(t0 + (static_cast<Real>(s) + 0.5) * plan.dt));
    widths.push_back(plan.dt);
  }
  if (plan.tail > 0.0) {
    pairs.push_back(family.pair_at(t0 + static_cast<Real>(plan.full) * plan.dt +
                                   0.5 * plan.tail));
    widths.push_back(plan.tail);
  }

  detail::parallel_for(modes, cfg.threads, [&](Index begin, Index end) {
    Real worst = 0.0;
    for (Index j = begin; j < end; ++j) {
      CVector x = data.col(j);
      const Real n0 = x.norm();
      for (std::size_t s = 0; s < pairs.size(); ++s) {
        const CMatrix h = family.assemble(pairs[s], j);
        if (cfg.scheme == Scheme::CrankNicolson) {
          x = cn_step(h, x, widths[s]);
        } else {
          x = unitary_exp(h, widths[s]) * x;
        }
        detail::track_drift(n0, x.norm(), worst);
      }
      data.col(j) = x;
    }
    std::lock_guard<std::mutex> lock(drift_mutex);
    report.max_norm_drift = std::max(report.max_norm_drift, worst);
  });
  return report;
}

inline EvolutionReport evolve_modes(const BlockFamily& family,
                                    WarpedStateDiscrete& state, Real T,
                                    const StepperConfig& cfg) {
  if (state.rep != Representation::Mode) {
    throw ConfigError("evolve_modes: discrete state must be in mode representation");
  }
  EvolutionReport r = evolve_blocks(family, state.data, state.t, T, cfg);
  state.t = T;
  return r;
}

inline EvolutionReport evolve_modes(const BlockFamily& family, WarpedStateXi& state,
                                    Real T, const StepperConfig& cfg) {
  EvolutionReport r = evolve_blocks(family, state.data, state.t, T, cfg);
  state.t = T;
  return r;
}

// ---------------------------------------------------------------------------
// Dense reference solver for du/dt = A(t) u + b(t).

inline constexpr Index kOracleMaxDim = 512;

struct OracleOptions {
  Real dt_ref = 1e-4;  // RK4 step for time-dependent data (upper bound)
};

inline CVector expm_oracle(const LinearSystem& sys, Real T, OracleOptions opt = {}) {
  if (sys.n > kOracleMaxDim) {
    throw OracleRefusedError("expm_oracle: dimension " + std::to_string(sys.n) +
                             " exceeds the dense limit " +
                             std::to_string(kOracleMaxDim));
  }
  if (sys.u0.size() != sys.n) throw DimensionError("expm_oracle: u0 has wrong length");
  if (T == 0.0) return sys.u0;

  if (!sys.time_dependent && !sys.has_source()) {
    const CMatrix a = sys.matrix_at(0.0) * Complex(T, 0.0);
    return a.exp() * sys.u0;
  }

  // Classical RK4; the step is capped by the stability limit of A(0).
  const Real a_norm = sys.matrix_at(0.0).norm();
  Real h = opt.dt_ref;
  if (a_norm > 0.0) h = std::min(h, 1.0 / a_norm);
  const Index steps = static_cast<Index>(std::ceil(T / h));
  h = T / static_cast<Real>(steps);
  auto rhs = [&sys](Real t, const CVector& u) -> CVector {
    CVector du = sys.matrix_at(t) * u;
    if (sys.has_source()) du += sys.source_at(t);
    return du;
  };
  CVector u = sys.u0;
  for (Index s = 0; s < steps; ++s) {
    const Real t = static_cast<Real>(s) * h;
    const CVector k1 = rhs(t, u);
    const CVector k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
    const CVector k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
    const CVector k4 = rhs(t + h, u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!u.allFinite()) throw SolverError("expm_oracle: RK4 diverged");
  return u;
}

// ---------------------------------------------------------------------------
// Dilation to an autonomous system.

struct DilationGrid {
  Real S = 1.0;
  Index Ns = 0;
  int m = 4;          // bump support half-width in grid steps
  Real hatX = 0.0;    // Gaussian variant: truncation of the dual variable
  Index hatN = 0;     // Gaussian variant: number of intervals (even)

  Real half_width() const { return kPi * S; }
  Real ds() const { return 2.0 * kPi * S / static_cast<Real>(Ns); }
  Real omega() const { return static_cast<Real>(m) * ds(); }
  Real point(Index j) const { return -half_width() + static_cast<Real>(j) * ds(); }
  Real freq(Index l) const {
    return (static_cast<Real>(l) - static_cast<Real>(Ns / 2)) / S;
  }
};

/// Raised-cosine approximation of the delta function on [-omega, omega].
inline Real cosine_bump(Real s, Real omega) {
  if (std::abs(s) >= omega) return 0.0;
  return (1.0 + std::cos(kPi * s / omega)) / (2.0 * omega);
}

/// Constant generator on the (clock x state) space and its initial data.
struct DilatedSystem {
  DilationGrid grid;
  Index n = 0;
  CMatrix H;   // (Ns n) x (Ns n), Hermitian
  CVector v0;  // stacked clock nodes, n entries per node

  /// Delta-weighted sum over the clock nodes approximating the integral of v.
  CVector recover(const CVector& v) const {
    CVector w = CVector::Zero(n);
    for (Index j = 0; j < grid.Ns; ++j) w += v.segment(j * n, n);
    return w * grid.ds();
  }
};

/// Builds P_s (x) I + blockdiag_j H(s_j) with P_s the Hermitian spectral
/// derivative generator on the periodic clock grid, so that transport in s
/// carries the bump along t.
inline DilatedSystem autonomize_discrete(const MatrixFn& H_of_t, const CVector& w0,
                                         const DilationGrid& grid, Real T) {
  if (grid.Ns <= 0 || grid.Ns % 2 != 0) {
    throw ConfigError("autonomize_discrete: Ns must be a positive even integer");
  }
  if (grid.m < 1) throw ConfigError("autonomize_discrete: m must be positive");
  if (!(grid.half_width() > 4.0 * grid.omega() + T)) {
    throw ConfigError("autonomize_discrete: clock domain too small, need pi*S > 4*omega + T");
  }
  const Index n = w0.size();
  const Index ns = grid.Ns;
  DilatedSystem out;
  out.grid = grid;
  out.n = n;

  // P_s = Phi diag(mu) Phi^{-1} with Phi(j, l) = exp(i mu_l (s_j + pi S)).
  CMatrix p_s(ns, ns);
  for (Index a = 0; a < ns; ++a) {
    for (Index b = 0; b < ns; ++b) {
      Complex acc = 0.0;
      for (Index l = 0; l < ns; ++l) {
        const Real phase = 2.0 * kPi * static_cast<Real>((l - ns / 2) * (a - b)) /
                           static_cast<Real>(ns);
        acc += grid.freq(l) * std::exp(Complex(0.0, phase));
      }
      p_s(a, b) = acc / static_cast<Real>(ns);
    }
  }

  out.H = CMatrix::Zero(ns * n, ns * n);
  for (Index a = 0; a < ns; ++a) {
    for (Index b = 0; b < ns; ++b) {
      if (p_s(a, b) != Complex(0.0, 0.0)) {
        out.H.block(a * n, b * n, n, n).diagonal().setConstant(p_s(a, b));
      }
    }
    const CMatrix h = H_of_t(grid.point(a));
    if (h.rows() != n || h.cols() != n) {
      throw DimensionError("autonomize_discrete: H(t) does not match w0");
    }
    out.H.block(a * n, a * n, n, n) += h;
  }

  out.v0 = CVector::Zero(ns * n);
  for (Index j = 0; j < ns; ++j) {
    out.v0.segment(j * n, n) = cosine_bump(grid.point(j), grid.omega()) * w0;
  }
  return out;
}

/// Evolves a dense constant generator; reports the global norm drift.
inline EvolutionReport evolve_dense(const CMatrix& H, CVector& v, Real T,
                                    const StepperConfig& cfg) {
  const detail::StepPlan plan = detail::plan_steps(0.0, T, cfg.dt);
  EvolutionReport report;
  report.steps = plan.total();
  report.final_time = T;
  const Real n0 = v.norm();
  if (cfg.scheme == Scheme::ExpmOracle) {
    v = unitary_exp(H, T) * v;
    detail::track_drift(n0, v.norm(), report.max_norm_drift);
    return report;
  }
  const Index dim = H.rows();
  const CMatrix half = Complex(0.0, 0.5 * plan.dt) * H;
  Eigen::PartialPivLU<CMatrix> lu(CMatrix::Identity(dim, dim) + half);
  for (Index s = 0; s < plan.full; ++s) {
    v = lu.solve(v - half * v);
    detail::track_drift(n0, v.norm(), report.max_norm_drift);
  }
  if (plan.tail > 0.0) {
    v = cn_step(H, v, plan.tail);
    detail::track_drift(n0, v.norm(), report.max_norm_drift);
  }
  if (!v.allFinite()) throw SolverError("evolve_dense: non-finite state");
  return report;
}

/// Gaussian-clock variant: decoupled blocks H - xhat_j I on the dual grid
/// xhat_j = -hatX + 2 hatX j / hatN with weights exp(-(xhat omega)^2/2)/(2 pi),
/// omega = 2 hatX / hatN. H is frozen at t = 0, so this is exact only for
/// autonomous generators.
struct GaussianDilation {
  BlockFamily family;
  CMatrix v0;  // n x (hatN + 1)
  Index center = 0;
  RVector nodes;
  RVector weights;

  CVector recover(const CMatrix& v) const { return 2.0 * kPi * v.col(center); }
};

inline GaussianDilation autonomize_continuous(const MatrixFn& H_of_t, const CVector& w0,
                                              Real hatX, Index hatN) {
  if (!(hatX > 0.0)) throw ConfigError("autonomize_continuous: hatX must be positive");
  if (hatN <= 0 || hatN % 2 != 0) {
    throw ConfigError("autonomize_continuous: hatN must be a positive even integer");
  }
  const Real omega = 2.0 * hatX / static_cast<Real>(hatN);
  GaussianDilation out;
  out.center = hatN / 2;
  out.nodes.resize(hatN + 1);
  out.weights.resize(hatN + 1);
  out.v0.resize(w0.size(), hatN + 1);
  for (Index j = 0; j <= hatN; ++j) {
    const Real x = -hatX + omega * static_cast<Real>(j);
    out.nodes(j) = x;
    out.weights(j) = std::exp(-0.5 * (x * omega) * (x * omega)) / (2.0 * kPi);
    out.v0.col(j) = out.weights(j) * w0;
  }
  const CMatrix h0 = H_of_t(0.0);
  const Index n = h0.rows();
  out.family.pair_at = [h0, n](Real) {
    return HermitianPair{CMatrix::Identity(n, n), h0};
  };
  out.family.coeff = RVector::Zero(hatN + 1);
  out.family.h2_coeff = 1.0;
  out.family.shift = -out.nodes;
  out.family.time_dependent = false;
  return out;
}

}  // namespace schro
