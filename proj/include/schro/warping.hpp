#pragma once

// Warped-phase initial profiles psi(p) and sizing of the truncated p- and
// xi-domains.

#include "schro/core.hpp"
#include "schro/system_model.hpp"

#include <cmath>
#include <string_view>

namespace schro {

enum class ProfileKind { Exponential, SmoothR2 };

inline Real exponential_profile(Real p) { return std::exp(-std::abs(p)); }

/// C^1 extension of e^{-p} to p < 0: a cubic on (-1, 0) joining e^{-|p|}.
inline Real smooth_profile_r2(Real p) {
  if (p > -1.0 && p < 0.0) {
    const Real e1 = std::exp(-1.0);
    return (((-3.0 + 3.0 * e1) * p + (-5.0 + 4.0 * e1)) * p - 1.0) * p + 1.0;
  }
  return std::exp(-std::abs(p));
}

struct WarpProfile {
  ProfileKind kind = ProfileKind::SmoothR2;

  Real operator()(Real p) const {
    return kind == ProfileKind::Exponential ? exponential_profile(p)
                                            : smooth_profile_r2(p);
  }

  /// Order of accuracy the profile buys in the p-discretization.
  int order() const { return kind == ProfileKind::Exponential ? 1 : 2; }
};

inline std::string_view to_string(ProfileKind k) {
  return k == ProfileKind::Exponential ? "exponential" : "smooth";
}

struct DomainSizing {
  Real piL = 0.0;      // half-width of the p-domain
  Real X = 0.0;        // xi truncation
  Real R = 1.0;        // recovery window length
  Real epsilon = 0.0;  // target accuracy
};

/// Smallest piL with
///   exp(-piL + 2 l+ T + R [+1]) <= eps  and  exp(-piL + l- T + l+ T + R [+1]) <= eps
/// (the bracketed +1 for a lifted inhomogeneous system), and X = ceil(1/eps).
inline DomainSizing size_domains(const SpectralBounds& bounds, Real T, Real R,
                                 Real epsilon, bool inhomogeneous) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidAccuracyError("size_domains: epsilon must lie in (0, 1)");
  }
  if (!(R >= 1.0 && R <= 2.0)) {
    throw DomainError("size_domains: recovery length R must lie in [1, 2]");
  }
  const Real lp = bounds.lambda_plus * T;
  const Real lm = bounds.lambda_minus * T;
  const Real margin = inhomogeneous ? 1.0 : 0.0;
  const Real log_eps = std::log(1.0 / epsilon);
  DomainSizing out;
  out.piL = std::max(2.0 * lp, lm + lp) + R + margin + log_eps;
  out.X = std::ceil(1.0 / epsilon);
  out.R = R;
  out.epsilon = epsilon;
  return out;
}

}  // namespace schro
