#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace schro {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr Real kPi = 3.14159265358979323846;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or input-shape problems (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidAccuracyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class WindowError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numerical failures (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSourceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OracleRefusedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

inline bool is_hermitian(const CMatrix& m, Real rel_tol = 1e-13) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= rel_tol * (1.0 + m.norm());
}

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Static block partition of [0, count) over at most `threads` workers.
// fn(begin, end) must only touch data owned by its range.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn) {
  const Index workers =
      std::max<Index>(1, std::min<Index>(static_cast<Index>(threads), count));
  if (workers == 1) {
    fn(Index{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (count + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &failures, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace detail
}  // namespace schro
