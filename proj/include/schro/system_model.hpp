#pragma once

// Input dynamical system du/dt = A(t)u + b(t), its Hermitian split
// A = H1 + iH2, sampled spectral bounds of H1, and the homogenizing lift
// of a source term into a 2n-dimensional system.

#include "schro/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <utility>

namespace schro {

using MatrixFn = std::function<CMatrix(Real)>;
using VectorFn = std::function<CVector(Real)>;

struct LinearSystem {
  Index n = 0;
  MatrixFn A;
  VectorFn b;  // empty means b == 0
  CVector u0;
  Real T = 1.0;
  bool time_dependent = false;

  bool has_source() const { return static_cast<bool>(b); }

  CMatrix matrix_at(Real t) const {
    CMatrix m = A(t);
    if (m.rows() != n || m.cols() != n) {
      throw DimensionError("A(t) has shape " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected " +
                           std::to_string(n) + "x" + std::to_string(n));
    }
    return m;
  }

  CVector source_at(Real t) const {
    if (!b) return CVector::Zero(n);
    CVector v = b(t);
    if (v.size() != n) {
      throw DimensionError("b(t) has length " + std::to_string(v.size()) +
                           ", expected " + std::to_string(n));
    }
    return v;
  }

  /// Autonomous homogeneous system with a fixed matrix.
  static LinearSystem constant(CMatrix a, CVector u0, Real T) {
    if (a.rows() != a.cols() || a.rows() != u0.size()) {
      throw DimensionError("constant system: A must be square and match u0");
    }
    LinearSystem sys;
    sys.n = a.rows();
    sys.A = [m = std::move(a)](Real) { return m; };
    sys.u0 = std::move(u0);
    sys.T = T;
    return sys;
  }
};

struct HermitianPair {
  CMatrix H1;
  CMatrix H2;

  Index dim() const { return H1.rows(); }
  CMatrix reconstruct() const { return H1 + kI * H2; }
};

/// H1 = (A + A^dagger)/2, H2 = (A - A^dagger)/(2i).
inline HermitianPair hermitian_decompose(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("hermitian_decompose: matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  const CMatrix adj = a.adjoint();
  return HermitianPair{(a + adj) * 0.5, (a - adj) / (2.0 * kI)};
}

struct SpectralBounds {
  Real lambda_plus = 0.0;   // max(0, largest eigenvalue over samples)
  Real lambda_minus = 0.0;  // max(0, -smallest eigenvalue over samples)
  std::vector<Real> sample_times;
};

inline constexpr int kDefaultTimeSamples = 33;

/// `count` uniformly spaced interior midpoints of [0, T] plus both endpoints.
inline std::vector<Real> sample_times(Real T, int count) {
  if (count < 1) throw ConfigError("sample_times: need at least one sample");
  std::vector<Real> ts;
  ts.reserve(static_cast<std::size_t>(count) + 2);
  ts.push_back(0.0);
  for (int i = 0; i < count; ++i) ts.push_back(T * (i + 0.5) / count);
  if (T > 0.0) ts.push_back(T);
  return ts;
}

inline RVector hermitian_eigenvalues(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw DecompositionError("Hermitian eigensolver did not converge");
  }
  return es.eigenvalues();  // ascending
}

inline SpectralBounds spectral_bounds(const MatrixFn& h1_at,
                                      std::vector<Real> times) {
  if (times.empty()) throw ConfigError("spectral_bounds: no sample times");
  SpectralBounds out;
  for (Real t : times) {
    const CMatrix h = h1_at(t);
    if (!detail::is_hermitian(h)) {
      throw DecompositionError("spectral_bounds: H1(" + std::to_string(t) +
                               ") is not Hermitian");
    }
    const RVector ev = hermitian_eigenvalues(h);
    out.lambda_plus = std::max(out.lambda_plus, ev(ev.size() - 1));
    out.lambda_minus = std::max(out.lambda_minus, -ev(0));
  }
  out.sample_times = std::move(times);
  return out;
}

inline SpectralBounds spectral_bounds(const MatrixFn& h1_at, Real T,
                                      int n_samples = kDefaultTimeSamples) {
  return spectral_bounds(h1_at, sample_times(T, n_samples));
}

/// Homogeneous system of dimension 2n carrying the source through an
/// auxiliary constant block r/gamma. For a source-free system the lift is the
/// identity (gamma = 1, no augmentation).
struct LiftedSystem {
  LinearSystem base;
  Index n_original = 0;
  bool augmented = false;
  Real gamma = 1.0;
  Real C_T = 1.0;
  Real b_sup = 0.0;    // max_t ||b(t)||_inf
  Real r0_norm = 0.0;  // ||r0||, r0 = all-ones
  MatrixFn tilde_H1;
  MatrixFn tilde_H2;

  HermitianPair pair_at(Real t) const {
    return hermitian_decompose(base.matrix_at(t));
  }

  /// |||b||| = |b| * ||r0||
  Real source_norm() const { return b_sup * r0_norm; }
};

inline LiftedSystem lift_inhomogeneous(
    const LinearSystem& sys, std::optional<Real> C_T = std::nullopt,
    std::optional<Real> gamma_override = std::nullopt,
    int n_samples = kDefaultTimeSamples) {
  LiftedSystem out;
  out.n_original = sys.n;
  out.C_T = C_T.value_or(sys.T);
  if (!(out.C_T > 0.0)) throw ConfigError("lift_inhomogeneous: C_T must be > 0");

  if (!sys.has_source()) {
    out.base = sys;
    out.base.b = nullptr;
    out.gamma = 1.0;
    out.tilde_H1 = [base = out.base](Real t) {
      return hermitian_decompose(base.matrix_at(t)).H1;
    };
    out.tilde_H2 = [base = out.base](Real t) {
      return hermitian_decompose(base.matrix_at(t)).H2;
    };
    return out;
  }

  for (Real t : sample_times(sys.T, n_samples)) {
    out.b_sup = std::max(out.b_sup, sys.source_at(t).cwiseAbs().maxCoeff());
  }
  if (!(out.b_sup > 0.0)) {
    throw DegenerateSourceError(
        "lift_inhomogeneous: source is flagged non-null but |b| = 0 on all "
        "samples");
  }
  out.augmented = true;
  out.gamma = gamma_override.value_or(1.0 / (out.C_T * out.b_sup));
  if (!(out.gamma > 0.0)) throw ConfigError("lift_inhomogeneous: gamma must be > 0");
  out.r0_norm = std::sqrt(static_cast<Real>(sys.n));

  const Index n = sys.n;
  const Real gamma = out.gamma;
  LinearSystem lifted;
  lifted.n = 2 * n;
  lifted.T = sys.T;
  // The source is opaque, so the lifted generator is treated as varying.
  lifted.time_dependent = true;
  lifted.A = [sys, gamma, n](Real t) {
    CMatrix a = CMatrix::Zero(2 * n, 2 * n);
    a.topLeftCorner(n, n) = sys.matrix_at(t);
    a.topRightCorner(n, n) = (gamma * sys.source_at(t)).asDiagonal();
    return a;
  };
  lifted.u0.resize(2 * n);
  lifted.u0.head(n) = sys.u0;
  lifted.u0.tail(n).setConstant(Complex(1.0 / gamma, 0.0));
  out.base = lifted;
  out.tilde_H1 = [lifted](Real t) {
    return hermitian_decompose(lifted.matrix_at(t)).H1;
  };
  out.tilde_H2 = [lifted](Real t) {
    return hermitian_decompose(lifted.matrix_at(t)).H2;
  };
  return out;
}

/// Largest sorted-eigenvalue displacement between tilde_H1(t) and
/// diag(H1^A(t), 0). Weyl's inequality bounds it by gamma*|b(t)|_inf/2.
inline Real weyl_shift_check(const LiftedSystem& lifted, Real t) {
  const CMatrix th1 = lifted.tilde_H1(t);
  CMatrix block = CMatrix::Zero(th1.rows(), th1.cols());
  const Index n = lifted.n_original;
  block.topLeftCorner(n, n) = th1.topLeftCorner(n, n);
  const RVector a = hermitian_eigenvalues(th1);
  const RVector b = hermitian_eigenvalues(block);
  return (a - b).cwiseAbs().maxCoeff();
}

/// True when the Hermitian matrix has at least one eigenvalue > tol and one
/// < -tol.
inline bool has_both_signs(const CMatrix& h, Real tol = 0.0) {
  const RVector ev = hermitian_eigenvalues(h);
  return ev(0) < -tol && ev(ev.size() - 1) > tol;
}

}  // namespace schro
