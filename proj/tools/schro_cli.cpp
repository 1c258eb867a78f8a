// Command-line front end: solve, scan, convergence, demo.

#include "schro/schro.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace schro;

struct Flags {
  std::string config;
  std::string out;
  std::map<std::string, std::string> settings;
};

// Registers one string-valued flag that maps onto a config key.
void add_setting(CLI::App* app, Flags& flags, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.settings[key] = v; }, help);
}

void add_common(CLI::App* app, Flags& flags) {
  app->add_option("--config", flags.config, "Config file ([run] and optional [system])");
  app->add_option("--out", flags.out, "Output CSV path (stdout when omitted)");
  add_setting(app, flags, "--experiment", "experiment",
              "scattering | backward-heat | maxwell-small | maxwell-big");
  add_setting(app, flags, "--disc", "disc", "discrete | continuous");
  add_setting(app, flags, "--Np", "Np", "Number of p nodes (discrete)");
  add_setting(app, flags, "--piL", "piL", "Half-width of the p domain (discrete)");
  add_setting(app, flags, "--X", "X", "xi truncation (continuous)");
  add_setting(app, flags, "--dxi", "dxi", "xi spacing (continuous)");
  add_setting(app, flags, "--dt", "dt", "Time step, a fraction like 1/256 is accepted");
  add_setting(app, flags, "--T", "T", "Final time");
  add_setting(app, flags, "--gamma", "gamma", "Source stretch coefficient");
  add_setting(app, flags, "--profile", "profile", "exponential | smooth");
  add_setting(app, flags, "--R", "R", "Recovery window length in [1, 2]");
  add_setting(app, flags, "--epsilon", "epsilon", "Target accuracy used to size domains");
  add_setting(app, flags, "--p-diamond", "p_diamond", "Recovery threshold override");
  add_setting(app, flags, "--recovery", "recovery", "point | integral");
  add_setting(app, flags, "--scheme", "scheme", "cn | expm");
  add_setting(app, flags, "--threads", "threads", "Worker threads for mode evolution");
  add_setting(app, flags, "--nx", "nx", "Maxwell cell count");
}

LoadedConfig assemble(const Flags& flags, const std::string& forced_experiment = "") {
  LoadedConfig loaded;
  if (!flags.config.empty()) loaded = load_config(parse_config_file(flags.config));
  for (const auto& [k, v] : flags.settings) apply_setting(loaded.run, k, v);
  if (!forced_experiment.empty()) {
    loaded.run.experiment = forced_experiment;
    loaded.custom.reset();
  }
  if (loaded.run.experiment == "custom" && !loaded.custom) {
    throw ConfigError("experiment 'custom' needs a [system] section");
  }
  return loaded;
}

Experiment experiment_for(const LoadedConfig& c) {
  if (c.custom) return *c.custom;
  return make_experiment(c.run.experiment, c.run.nx);
}

void deliver(const std::string& path, const std::string& csv) {
  if (path.empty()) {
    std::cout << csv;
  } else {
    write_file(path, csv);
  }
}

void print_summary(const RunResult& r, std::ostream& os) {
  const ResolvedConfig& c = r.config;
  os << "experiment      " << r.experiment << "\n";
  os << "discretization  " << to_string(c.disc);
  if (c.disc == Discretization::DiscreteFourier) {
    os << "  piL=" << c.piL << " Np=" << c.Np;
  } else {
    os << "  X=" << c.X << " dxi=" << c.dxi;
  }
  os << "  dt=" << c.dt << " T=" << c.T << "\n";
  os << "profile         " << to_string(c.profile) << "\n";
  os << "lambda+         " << r.bounds.lambda_plus << "\n";
  os << "gamma           " << r.gamma << "\n";
  os << "p_diamond       " << r.p_diamond << "\n";
  os << "p_recover       " << r.p_recover << "\n";
  if (r.point_error) os << "point_error     " << format_real(*r.point_error) << "\n";
  if (r.window_error) os << "window_error    " << format_real(*r.window_error) << "\n";
  if (r.auxiliary_error) os << "aux_error       " << format_real(*r.auxiliary_error) << "\n";
  if (r.measurement) {
    os << "C_e0 / C_e      " << r.measurement->C_e0 << " / " << r.measurement->C_e << "\n";
    os << "repetitions g   " << r.measurement->g << "\n";
  }
  os << "steps           " << r.evolution.steps << "\n";
  os << "norm_drift      " << format_real(r.evolution.max_norm_drift) << "\n";
  os << "time assemble   " << r.timings.assemble << " s\n";
  os << "time evolve     " << r.timings.evolve << " s\n";
  os << "time recover    " << r.timings.recover << " s\n";
}

std::string solution_csv(const RunResult& r, const Experiment& e) {
  std::string out = "index,x,real,imag\n";
  for (Index i = 0; i < r.u.size(); ++i) {
    const Real x = i < e.x.size() ? e.x(i) : static_cast<Real>(i);
    out += std::to_string(i) + "," + format_real(x) + "," + format_real(r.u(i).real()) +
           "," + format_real(r.u(i).imag()) + "\n";
  }
  return out;
}

WarningSink stderr_warnings() {
  return [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schrodingerization solver for linear dynamical systems"};
  app.require_subcommand(1);

  Flags solve_flags, scan_flags, conv_flags, demo_flags;
  auto* solve = app.add_subcommand("solve", "Run one configuration and recover u(T)");
  add_common(solve, solve_flags);

  auto* scan = app.add_subcommand("scan", "Relative error of point recovery against p");
  add_common(scan, scan_flags);
  double pmin = 0.0, pmax = 10.0, pstep = 0.05;
  scan->add_option("--pmin", pmin, "First p");
  scan->add_option("--pmax", pmax, "Last p");
  scan->add_option("--pstep", pstep, "p increment")->check(CLI::PositiveNumber);

  auto* conv = app.add_subcommand("convergence", "Refinement study with fitted order");
  add_common(conv, conv_flags);
  int rungs = 3;
  conv->add_option("--rungs", rungs, "Number of refinement levels")->check(CLI::Range(3, 8));

  auto* demo = app.add_subcommand("demo", "Run an experiment with its recommended parameters");
  add_common(demo, demo_flags);
  std::string demo_name;
  demo->add_option("name", demo_name, "Experiment name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const LoadedConfig c = assemble(solve_flags);
      const Experiment e = experiment_for(c);
      const RunResult r = run(e, c.run, stderr_warnings());
      print_summary(r, solve_flags.out.empty() ? std::cerr : std::cout);
      deliver(solve_flags.out, solution_csv(r, e));
    } else if (scan->parsed()) {
      if (pmax < pmin) throw ConfigError("--pmax must not be below --pmin");
      const LoadedConfig c = assemble(scan_flags);
      const Experiment e = experiment_for(c);
      const RunResult r = run(e, c.run, stderr_warnings());
      if (!r.exact) throw ConfigError("scan needs an experiment with a reference solution");
      std::vector<Real> ps;
      const auto count = static_cast<Index>(std::floor((pmax - pmin) / pstep + 1e-9));
      for (Index i = 0; i <= count; ++i) ps.push_back(pmin + static_cast<Real>(i) * pstep);
      RecoveryOptions opt;
      opt.components = e.system.n;
      std::vector<ScanRow> rows;
      if (r.discrete_state) {
        rows = error_scan(*r.discrete_state, *r.exact, ps, opt);
      } else {
        rows = error_scan(*r.xi_state, *r.exact, ps, opt);
      }
      deliver(scan_flags.out, scan_csv(rows));
    } else if (conv->parsed()) {
      const LoadedConfig c = assemble(conv_flags);
      const ConvergenceReport rep = convergence(experiment_for(c), c.run, rungs);
      deliver(conv_flags.out, report_csv(rep));
    } else if (demo->parsed()) {
      const LoadedConfig c = assemble(demo_flags, demo_name);
      const Experiment e = experiment_for(c);
      const RunResult r = run(e, c.run, stderr_warnings());
      print_summary(r, std::cout);
      if (!demo_flags.out.empty()) write_file(demo_flags.out, solution_csv(r, e));
    }
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const NumericalError& ex) {
    std::cerr << "numerical error: " << ex.what() << "\n";
    return 3;
  }
  return 0;
}
