#pragma once

// Reading u(T) back out of the warped state: threshold, recovery window,
// point and integral recovery, error scans and the measurement-cost
// arithmetic.

#include "schro/core.hpp"
#include "schro/fourier_xi.hpp"
#include "schro/spectral_p.hpp"
#include "schro/system_model.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace schro {

inline constexpr Real kInhomogeneousMargin = 1.0;

inline Real p_diamond(const SpectralBounds& bounds, Real T, bool inhomogeneous,
                      Real margin = kInhomogeneousMargin) {
  return bounds.lambda_plus * T + (inhomogeneous ? margin : 0.0);
}

struct RecoveryWindow {
  Real p_diamond = 0.0;
  Real R = 1.0;
  std::vector<Index> indices;  // grid nodes with p_diamond <= p_k <= p_diamond + R

  Real lower() const { return p_diamond; }
  Real upper() const { return p_diamond + R; }
};

inline RecoveryWindow make_window(const PGrid& grid, Real p_dia, Real R) {
  if (!(R > 0.0)) throw WindowError("recovery window length must be positive");
  RecoveryWindow w;
  w.p_diamond = p_dia;
  w.R = R;
  for (Index k = 0; k < grid.Np; ++k) {
    const Real p = grid.point(k);
    if (p >= p_dia && p <= p_dia + R) w.indices.push_back(k);
  }
  return w;
}

/// Smallest grid node strictly above p_diamond + R/4.
inline Real default_recovery_point(const PGrid& grid, Real p_dia, Real R) {
  const Real target = p_dia + 0.25 * R;
  const Real k = std::floor((target + grid.half_width()) / grid.dp()) + 1.0;
  const Real p = -grid.half_width() + k * grid.dp();
  if (p >= grid.half_width()) {
    throw WindowError("default recovery point lies outside the p-domain");
  }
  return p;
}

using WarningSink = std::function<void(const std::string&)>;

// Uniform access to the two warped representations.
inline CVector reconstruct(const WarpedStateDiscrete& s, Real p) { return reconstruct_w(s, p); }
inline CVector reconstruct(const WarpedStateXi& s, Real p) { return reconstruct_whc(s, p); }
inline CVector integrate_tail(const WarpedStateDiscrete& s, Real p) { return integrate_w(s, p); }
inline CVector integrate_tail(const WarpedStateXi& s, Real p) { return integrate_whc(s, p); }

struct RecoveryOptions {
  Index components = -1;  // leading components to return; -1 keeps all
  Real threshold = -std::numeric_limits<Real>::infinity();
  WarningSink warn;
};

namespace detail {

inline CVector leading(const CVector& v, Index count) {
  if (count < 0 || count >= v.size()) return v;
  return v.head(count);
}

inline void warn_below(const RecoveryOptions& opt, Real p) {
  if (p < opt.threshold && opt.warn) {
    opt.warn("recovery at p = " + std::to_string(p) + " is below the threshold " +
             std::to_string(opt.threshold));
  }
}

}  // namespace detail

/// e^p w(T, p), returned in physical units.
template <typename State>
CVector recover_point(const State& state, Real p, const RecoveryOptions& opt = {}) {
  detail::warn_below(opt, p);
  const CVector w = reconstruct(state, p);
  return detail::leading(w, opt.components) * std::exp(p + state.log_scale);
}

/// e^p times the integral of w(T, .) over [p, end of domain].
template <typename State>
CVector recover_integral(const State& state, Real p, const RecoveryOptions& opt = {}) {
  detail::warn_below(opt, p);
  const CVector w = integrate_tail(state, p);
  return detail::leading(w, opt.components) * std::exp(p + state.log_scale);
}

using ScanRow = std::pair<Real, Real>;

template <typename State>
std::vector<ScanRow> error_scan(const State& state, const CVector& exact,
                                const std::vector<Real>& ps,
                                const RecoveryOptions& opt = {}) {
  const Real ref = exact.norm();
  if (!(ref > 0.0)) throw ConfigError("error_scan: exact solution is zero");
  RecoveryOptions quiet = opt;
  quiet.warn = nullptr;
  std::vector<ScanRow> rows;
  rows.reserve(ps.size());
  for (Real p : ps) {
    const CVector u = recover_point(state, p, quiet);
    if (u.size() != exact.size()) {
      throw DimensionError("error_scan: exact solution has the wrong length");
    }
    rows.emplace_back(p, (exact - u).norm() / ref);
  }
  return rows;
}

/// Relative L2 error of point recovery across (lower, upper): grid nodes in
/// the window for the discrete representation, `samples` midpoints for the
/// continuous one.
inline Real window_error(const WarpedStateDiscrete& state, const CVector& exact,
                         Real lower, Real upper, Index components = -1) {
  RecoveryOptions opt;
  opt.components = components;
  Real acc = 0.0;
  Index count = 0;
  for (Index k = 0; k < state.grid.Np; ++k) {
    const Real p = state.grid.point(k);
    if (p > lower && p < upper) {
      acc += (recover_point(state, p, opt) - exact).squaredNorm();
      ++count;
    }
  }
  if (count == 0) throw WindowError("window_error: no grid node inside the window");
  return std::sqrt(acc / static_cast<Real>(count)) / exact.norm();
}

inline Real window_error(const WarpedStateXi& state, const CVector& exact, Real lower,
                         Real upper, Index components = -1, Index samples = 64) {
  if (!(upper > lower)) throw WindowError("window_error: empty window");
  RecoveryOptions opt;
  opt.components = components;
  Real acc = 0.0;
  for (Index i = 0; i < samples; ++i) {
    const Real p = lower + (upper - lower) * (static_cast<Real>(i) + 0.5) /
                               static_cast<Real>(samples);
    acc += (recover_point(state, p, opt) - exact).squaredNorm();
  }
  return std::sqrt(acc / static_cast<Real>(samples)) / exact.norm();
}

struct MeasurementEstimate {
  Real C_e0 = 0.0;
  Real C_e = 0.0;
  Real success_prob_ratio = 0.0;  // C_e0^2 / C_e^2
  Real g = 1.0;                   // repetition estimate
};

inline MeasurementEstimate measurement_estimate(const PGrid& grid,
                                                const RecoveryWindow& window,
                                                Real u0_norm, Real uT_norm) {
  if (window.indices.empty()) throw WindowError("measurement_estimate: empty window");
  if (!(u0_norm > 0.0 && uT_norm > 0.0)) {
    throw ConfigError("measurement_estimate: norms must be positive");
  }
  MeasurementEstimate m;
  Real all = 0.0;
  for (Index k = 0; k < grid.Np; ++k) all += std::exp(-2.0 * std::abs(grid.point(k)));
  Real win = 0.0;
  for (Index k : window.indices) win += std::exp(-2.0 * std::abs(grid.point(k)));
  m.C_e = std::sqrt(all);
  m.C_e0 = std::sqrt(win);
  m.success_prob_ratio = win / all;
  m.g = std::max<Real>(1.0, (m.C_e / m.C_e0) * (u0_norm / uT_norm));
  return m;
}

}  // namespace schro
