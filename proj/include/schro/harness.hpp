#pragma once

// End-to-end runs (lift, warp, discretize, evolve, recover), refinement
// studies, CSV output and the sectioned key=value configuration format.

#include "schro/core.hpp"
#include "schro/evolve.hpp"
#include "schro/fourier_xi.hpp"
#include "schro/problems.hpp"
#include "schro/recover.hpp"
#include "schro/spectral_p.hpp"
#include "schro/system_model.hpp"
#include "schro/warping.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace schro {

enum class RecoveryMode { Point, Integral };

struct RunConfig {
  std::string experiment = "maxwell-small";
  std::optional<Discretization> disc;
  std::optional<ProfileKind> profile;
  std::optional<Index> Np;
  std::optional<Real> piL;
  std::optional<Real> X;
  std::optional<Real> dxi;
  std::optional<Real> dt;
  std::optional<Real> T;
  std::optional<Real> gamma;
  std::optional<Real> R;
  std::optional<Real> epsilon;
  std::optional<Real> p_diamond;
  std::optional<RecoveryMode> recovery;
  Index nx = 8;  // Maxwell cell count
  unsigned threads = detail::default_threads();
  Scheme scheme = Scheme::CrankNicolson;
};

/// Parameters after defaults from the experiment have been applied.
struct ResolvedConfig {
  Discretization disc = Discretization::DiscreteFourier;
  ProfileKind profile = ProfileKind::SmoothR2;
  Index Np = 0;
  Real piL = 0.0;
  Real X = 0.0;
  Real dxi = 0.0;
  Real dt = 0.0;
  Real T = 0.0;
  std::optional<Real> gamma;
  Real R = 1.0;
  std::optional<Real> p_diamond;
  RecoveryMode recovery = RecoveryMode::Point;
  unsigned threads = 1;
  Scheme scheme = Scheme::CrankNicolson;
};

struct Timings {
  double assemble = 0.0;
  double evolve = 0.0;
  double recover = 0.0;
};

struct RunResult {
  std::string experiment;
  ResolvedConfig config;
  SpectralBounds bounds;
  Real gamma = 1.0;
  Real p_diamond = 0.0;
  Real p_recover = 0.0;
  CVector u;                    // recovered u(T), physical units
  std::optional<CVector> exact;  // reference u(T)
  std::optional<Real> point_error;
  std::optional<Real> window_error;
  std::optional<Real> auxiliary_error;  // lifted block vs r0/gamma
  std::optional<MeasurementEstimate> measurement;
  EvolutionReport evolution;
  Timings timings;
  std::optional<WarpedStateDiscrete> discrete_state;
  std::optional<WarpedStateXi> xi_state;
};

inline ResolvedConfig resolve(const RunConfig& cfg, const Experiment& e) {
  const RecommendedParams& rec = e.recommended;
  ResolvedConfig out;
  out.disc = cfg.disc.value_or(rec.disc);
  if (out.disc == Discretization::DiscreteFourier && (cfg.X || cfg.dxi)) {
    throw ConfigError("X/dxi given for a discrete-Fourier run; use Np/piL");
  }
  if (out.disc == Discretization::ContinuousFourier && (cfg.Np || cfg.piL)) {
    throw ConfigError("Np/piL given for a continuous-Fourier run; use X/dxi");
  }
  out.profile = cfg.profile.value_or(rec.profile);
  out.T = cfg.T.value_or(rec.T);
  out.dt = cfg.dt.value_or(rec.dt);
  out.R = cfg.R.value_or(rec.R);
  out.gamma = cfg.gamma ? cfg.gamma : rec.gamma;
  out.p_diamond = cfg.p_diamond ? cfg.p_diamond : rec.p_diamond;
  out.recovery = cfg.recovery.value_or(RecoveryMode::Point);
  out.threads = cfg.threads;
  out.scheme = cfg.scheme;
  out.piL = cfg.piL.value_or(rec.piL);
  out.Np = cfg.Np.value_or(rec.Np);
  out.X = cfg.X.value_or(rec.X);
  out.dxi = cfg.dxi.value_or(rec.dxi);

  if (!(out.T > 0.0)) throw ConfigError("T must be positive");
  if (!(out.dt > 0.0) || out.dt > out.T) throw ConfigError("dt must lie in (0, T]");
  if (out.R < 1.0 || out.R > 2.0) throw DomainError("R must lie in [1, 2]");
  if (out.gamma && !(*out.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (out.Np <= 0 || out.Np % 2 != 0) throw ConfigError("Np must be a positive even integer");
  if (!(out.piL > 0.0)) throw ConfigError("piL must be positive");
  if (!(out.X > 0.0) || !(out.dxi > 0.0)) throw ConfigError("X and dxi must be positive");
  if (out.disc == Discretization::ContinuousFourier) {
    (void)XiGrid::with_spacing(out.X, out.dxi);
  }
  if (cfg.epsilon) {
    if (!(*cfg.epsilon > 0.0 && *cfg.epsilon < 1.0)) {
      throw InvalidAccuracyError("epsilon must lie in (0, 1)");
    }
  }
  return out;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace detail

inline RunResult run(const Experiment& experiment, const RunConfig& cfg,
                     const WarningSink& warn = nullptr) {
  ResolvedConfig rc = resolve(cfg, experiment);
  RunResult res;
  res.experiment = experiment.name;

  auto t0 = detail::Clock::now();
  LinearSystem sys = experiment.system;
  sys.T = rc.T;
  const LiftedSystem lifted = lift_inhomogeneous(sys, std::nullopt, rc.gamma);
  res.gamma = lifted.gamma;
  res.bounds = spectral_bounds(lifted.tilde_H1, rc.T);
  res.p_diamond = rc.p_diamond.value_or(p_diamond(res.bounds, rc.T, lifted.augmented));

  // Accuracy-driven sizing only fills in what was not given explicitly.
  if (cfg.epsilon) {
    const DomainSizing sizing =
        size_domains(res.bounds, rc.T, rc.R, *cfg.epsilon, lifted.augmented);
    if (!cfg.piL) {
      const Real dp = 2.0 * rc.piL / static_cast<Real>(rc.Np);
      const PGrid g = PGrid::with_spacing(sizing.piL, dp);
      rc.piL = g.half_width();
      rc.Np = g.Np;
    }
    if (!cfg.X) {
      rc.X = sizing.X;
      rc.X = std::ceil(2.0 * rc.X / rc.dxi) * rc.dxi / 2.0;
    }
  }
  res.config = rc;

  const Index n_keep = lifted.n_original;
  auto pair_at = [&lifted](Real t) { return lifted.pair_at(t); };
  StepperConfig step;
  step.dt = rc.dt;
  step.scheme = rc.scheme;
  step.time_dependent = lifted.base.time_dependent;
  step.threads = rc.threads;

  RecoveryOptions opt;
  opt.components = n_keep;
  opt.threshold = res.p_diamond;
  opt.warn = warn;

  if (experiment.exact) res.exact = experiment.exact(rc.T);

  auto finish = [&](const auto& state) {
    auto t2 = detail::Clock::now();
    res.u = rc.recovery == RecoveryMode::Point ? recover_point(state, res.p_recover, opt)
                                               : recover_integral(state, res.p_recover, opt);
    if (lifted.augmented) {
      RecoveryOptions all = opt;
      all.components = -1;
      all.warn = nullptr;
      const CVector full = recover_point(state, res.p_recover, all);
      const CVector aux = full.tail(full.size() - n_keep);
      const CVector target = CVector::Constant(aux.size(), Complex(1.0 / lifted.gamma, 0.0));
      res.auxiliary_error = (aux - target).norm() / target.norm();
    }
    if (res.exact) {
      res.point_error = (res.u - *res.exact).norm() / res.exact->norm();
      res.window_error = window_error(state, *res.exact, res.p_diamond,
                                      res.p_diamond + rc.R, n_keep);
    }
    res.timings.recover = detail::seconds_since(t2);
  };

  if (rc.disc == Discretization::DiscreteFourier) {
    const PGrid grid = PGrid::from_half_width(rc.piL, rc.Np);
    WarpedStateDiscrete state = to_mode_space(make_discrete_state(
        grid, WarpProfile{rc.profile}, lifted.base.u0, experiment.log_scale));
    const BlockFamily family = mode_hamiltonian(pair_at, grid, lifted.base.time_dependent);
    res.timings.assemble = detail::seconds_since(t0);
    auto t1 = detail::Clock::now();
    res.evolution = evolve_modes(family, state, rc.T, step);
    res.timings.evolve = detail::seconds_since(t1);
    res.p_recover = default_recovery_point(grid, res.p_diamond, rc.R);
    finish(state);
    const RecoveryWindow window = make_window(grid, res.p_diamond, rc.R);
    const Real u0_norm = experiment.system.u0.norm() * std::exp(experiment.log_scale);
    const Real uT_norm = res.u.norm();
    if (!window.indices.empty() && u0_norm > 0.0 && uT_norm > 0.0) {
      res.measurement = measurement_estimate(grid, window, u0_norm, uT_norm);
    }
    res.discrete_state = std::move(state);
  } else {
    const XiGrid grid = XiGrid::with_spacing(rc.X, rc.dxi);
    WarpedStateXi state = init_xi_state(lifted.base.u0, grid, experiment.log_scale);
    const BlockFamily family = xi_block_family(pair_at, grid, lifted.base.time_dependent);
    res.timings.assemble = detail::seconds_since(t0);
    auto t1 = detail::Clock::now();
    res.evolution = evolve_modes(family, state, rc.T, step);
    res.timings.evolve = detail::seconds_since(t1);
    res.p_recover = res.p_diamond + 0.25 * rc.R;
    finish(state);
    res.xi_state = std::move(state);
  }
  return res;
}

inline RunResult run(const RunConfig& cfg, const WarningSink& warn = nullptr) {
  return run(make_experiment(cfg.experiment, cfg.nx), cfg, warn);
}

// ---------------------------------------------------------------------------
// Refinement studies.

struct ConvergenceRow {
  Real resolution = 0.0;  // dp (discrete) or 1/X (continuous)
  Real error = 0.0;       // relative L2 error over the recovery window
  std::optional<Real> order;  // local order against the previous row
  Real max_norm_drift = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  Real fitted_order = 0.0;
};

/// Least-squares slope of log(error) against log(resolution).
inline Real fitted_order(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) throw ConfigError("fitted_order: need at least two rows");
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const Real m = static_cast<Real>(rows.size());
  for (const auto& r : rows) {
    const Real x = std::log(r.resolution);
    const Real y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Each rung halves dp and dt (discrete) or doubles X and halves dt
/// (continuous) relative to the template.
inline ConvergenceReport convergence(const Experiment& experiment, const RunConfig& base,
                                     int rungs = 3) {
  if (rungs < 3) throw ConfigError("convergence: need at least three rungs");
  const ResolvedConfig rc = resolve(base, experiment);
  ConvergenceReport report;
  for (int k = 0; k < rungs; ++k) {
    RunConfig cfg = base;
    const Real scale = std::ldexp(1.0, k);
    cfg.dt = rc.dt / scale;
    Real resolution = 0.0;
    if (rc.disc == Discretization::DiscreteFourier) {
      cfg.Np = rc.Np * static_cast<Index>(scale);
      cfg.piL = rc.piL;
      resolution = 2.0 * rc.piL / static_cast<Real>(*cfg.Np);
    } else {
      cfg.X = rc.X * scale;
      cfg.dxi = rc.dxi;
      resolution = 1.0 / *cfg.X;
    }
    cfg.epsilon.reset();
    const RunResult r = run(experiment, cfg);
    if (!r.window_error) throw ConfigError("convergence: experiment has no reference");
    ConvergenceRow row;
    row.resolution = resolution;
    row.error = *r.window_error;
    row.max_norm_drift = r.evolution.max_norm_drift;
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back();
      row.order = std::log(prev.error / row.error) / std::log(prev.resolution / row.resolution);
    }
    report.rows.push_back(row);
  }
  report.fitted_order = fitted_order(report.rows);
  return report;
}

// ---------------------------------------------------------------------------
// CSV output. Numbers use full-precision scientific notation.

inline std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "p,rel_error\n";
  for (const auto& [p, e] : rows) out += format_real(p) + "," + format_real(e) + "\n";
  return out;
}

inline std::string report_csv(const ConvergenceReport& report) {
  std::string out = "resolution,error,order\n";
  for (const auto& r : report.rows) {
    out += format_real(r.resolution) + "," + format_real(r.error) + ",";
    if (r.order) out += format_real(*r.order);
    out += "\n";
  }
  out += "fitted_order,," + format_real(report.fitted_order) + "\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

inline void emit_csv(const std::vector<ScanRow>& rows, const std::string& path) {
  write_file(path, scan_csv(rows));
}

inline void emit_csv(const ConvergenceReport& report, const std::string& path) {
  write_file(path, report_csv(report));
}

// ---------------------------------------------------------------------------
// Sectioned key = value configuration.

using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline ConfigSections parse_config(std::istream& in) {
  ConfigSections out;
  std::string section = "run";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment anywhere; ';' only at the start of a line, since
    // it also separates matrix rows.
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline ConfigSections parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(f);
}

/// Real number, optionally written as a fraction "a/b".
inline Real parse_real(const std::string& text) {
  const std::string s = trim(text);
  auto number = [&](const std::string& part) {
    std::size_t used = 0;
    Real v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + text + "'");
    }
    if (used != part.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return number(s);
  const Real den = number(trim(s.substr(slash + 1)));
  if (den == 0.0) throw ConfigError("zero denominator in '" + text + "'");
  return number(trim(s.substr(0, slash))) / den;
}

inline Index parse_index(const std::string& text) {
  const Real v = parse_real(text);
  if (v != std::floor(v)) throw ConfigError("expected an integer, got '" + text + "'");
  return static_cast<Index>(v);
}

inline Discretization parse_discretization(const std::string& s) {
  if (s == "discrete" || s == "dft") return Discretization::DiscreteFourier;
  if (s == "continuous" || s == "cft") return Discretization::ContinuousFourier;
  throw ConfigError("unknown discretization '" + s + "'");
}

inline ProfileKind parse_profile(const std::string& s) {
  if (s == "exponential" || s == "exp") return ProfileKind::Exponential;
  if (s == "smooth" || s == "smooth2") return ProfileKind::SmoothR2;
  throw ConfigError("unknown profile '" + s + "'");
}

inline RecoveryMode parse_recovery(const std::string& s) {
  if (s == "point") return RecoveryMode::Point;
  if (s == "integral") return RecoveryMode::Integral;
  throw ConfigError("unknown recovery mode '" + s + "'");
}

/// Applies one key of the [run] section (or the matching command-line flag).
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "disc") cfg.disc = parse_discretization(value);
  else if (key == "profile") cfg.profile = parse_profile(value);
  else if (key == "Np") cfg.Np = parse_index(value);
  else if (key == "piL") cfg.piL = parse_real(value);
  else if (key == "X") cfg.X = parse_real(value);
  else if (key == "dxi") cfg.dxi = parse_real(value);
  else if (key == "dt") cfg.dt = parse_real(value);
  else if (key == "T") cfg.T = parse_real(value);
  else if (key == "gamma") cfg.gamma = parse_real(value);
  else if (key == "R") cfg.R = parse_real(value);
  else if (key == "epsilon") cfg.epsilon = parse_real(value);
  else if (key == "p_diamond") cfg.p_diamond = parse_real(value);
  else if (key == "recovery") cfg.recovery = parse_recovery(value);
  else if (key == "nx") cfg.nx = parse_index(value);
  else if (key == "threads") {
    const Index t = parse_index(value);
    if (t < 1) throw ConfigError("threads must be >= 1");
    cfg.threads = static_cast<unsigned>(t);
  } else if (key == "scheme") {
    if (value == "cn") cfg.scheme = Scheme::CrankNicolson;
    else if (value == "expm") cfg.scheme = Scheme::ExpmOracle;
    else throw ConfigError("unknown scheme '" + value + "'");
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

inline std::vector<Real> parse_list(const std::string& text) {
  std::vector<Real> out;
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == ';' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) out.push_back(parse_real(tok));
  return out;
}

/// Inline system from a [system] section:
///   n = 2
///   A = -1 0; 0 -2        (row-major, real)
///   b = 1 1               (optional constant source)
///   u0 = 1 1
///   T = 1
inline Experiment experiment_from_section(const std::map<std::string, std::string>& sec) {
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = sec.find(k);
    if (it == sec.end()) throw ConfigError("[system] is missing '" + k + "'");
    return it->second;
  };
  const Index n = parse_index(get("n"));
  if (n < 1) throw DimensionError("[system] n must be positive");
  const std::vector<Real> a = parse_list(get("A"));
  const std::vector<Real> u0 = parse_list(get("u0"));
  if (static_cast<Index>(a.size()) != n * n) {
    throw DimensionError("[system] A needs n*n = " + std::to_string(n * n) + " entries");
  }
  if (static_cast<Index>(u0.size()) != n) throw DimensionError("[system] u0 needs n entries");
  CMatrix am(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) am(i, j) = a[static_cast<std::size_t>(i * n + j)];
  }
  CVector uv(n);
  for (Index i = 0; i < n; ++i) uv(i) = u0[static_cast<std::size_t>(i)];
  const Real T = sec.count("T") ? parse_real(sec.at("T")) : 1.0;

  Experiment e;
  e.name = "custom";
  e.system = LinearSystem::constant(am, uv, T);
  if (sec.count("b")) {
    const std::vector<Real> b = parse_list(sec.at("b"));
    if (static_cast<Index>(b.size()) != n) throw DimensionError("[system] b needs n entries");
    CVector bv(n);
    for (Index i = 0; i < n; ++i) bv(i) = b[static_cast<std::size_t>(i)];
    if (bv.norm() > 0.0) e.system.b = [bv](Real) { return bv; };
  }
  e.x = RVector::LinSpaced(n, 0.0, static_cast<Real>(n - 1));
  const LinearSystem sys = e.system;
  if (n <= kOracleMaxDim) {
    e.exact = [sys](Real t) { return expm_oracle(sys, t); };
    e.reference = ReferenceKind::SemiDiscrete;
  }
  auto& r = e.recommended;
  r.disc = Discretization::DiscreteFourier;
  r.profile = ProfileKind::SmoothR2;
  r.T = T;
  r.dt = std::min<Real>(1e-2, T);
  r.piL = 10.0;
  r.Np = 512;
  r.X = 80.0;
  r.dxi = 5.0 / 16.0;
  r.R = 1.0;
  return e;
}

struct LoadedConfig {
  RunConfig run;
  std::optional<Experiment> custom;
};

inline LoadedConfig load_config(const ConfigSections& sections) {
  LoadedConfig out;
  if (auto it = sections.find("run"); it != sections.end()) {
    for (const auto& [k, v] : it->second) apply_setting(out.run, k, v);
  }
  if (auto it = sections.find("system"); it != sections.end()) {
    out.custom = experiment_from_section(it->second);
    out.run.experiment = "custom";
  }
  for (const auto& [name, _] : sections) {
    if (name != "run" && name != "system") {
      throw ConfigError("unknown config section [" + name + "]");
    }
  }
  return out;
}

}  // namespace schro
