#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "defalg/dynamics.hpp"
#include "defalg/errors.hpp"
#include "defalg/scenario.hpp"
#include "defalg/version.hpp"

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string load_scenario_text(const std::string& arg) {
  if (const defalg::scenario::BuiltinScenario* b =
          defalg::scenario::find_builtin(arg)) {
    return b->text;
  }
  std::ifstream in(arg, std::ios::binary);
  if (!in) {
    throw defalg::ConfigError("scenario '" + arg +
                              "' is neither a bundled name nor a readable "
                              "file (see list-scenarios)");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GlobalOptions {
  std::optional<double> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

int cmd_run(const std::string& scenario_arg, const GlobalOptions& g) {
  defalg::scenario::RunOptions opts;
  opts.tolerance = g.tol;
  opts.samples = g.samples;
  opts.seed = g.seed;
  defalg::scenario::RunOutcome out =
      defalg::scenario::run_scenario_text(load_scenario_text(scenario_arg),
                                          opts);
  if (g.out) {
    std::ofstream f(*g.out, std::ios::binary);
    if (!f) throw defalg::ConfigError("cannot open '" + *g.out + "' for writing");
    f << out.report;
  } else {
    std::cout << out.report;
  }
  return out.exit_code;
}

int cmd_list() {
  for (const auto& b : defalg::scenario::builtin_scenarios()) {
    std::cout << b.name << " → " << b.anchor << "\n";
  }
  return 0;
}

int cmd_integrate(const std::string& name, std::optional<double> t1,
                  std::optional<double> h, std::optional<int> stride,
                  const GlobalOptions& g) {
  defalg::scenario::DynamicsSetup setup = defalg::scenario::dynamics_setup(name);
  defalg::dynamics::Trajectory traj = defalg::dynamics::rk4_integrate(
      setup.system, setup.default_state, 0.0, t1.value_or(setup.default_t1),
      h.value_or(setup.default_step), stride.value_or(setup.default_stride));

  // CSV to the requested file, drifts to stdout; without --out the CSV owns
  // stdout and the drifts go to stderr.
  std::ostream* summary = &std::cout;
  if (g.out) {
    std::ofstream f(*g.out, std::ios::binary);
    if (!f) throw defalg::ConfigError("cannot open '" + *g.out + "' for writing");
    defalg::dynamics::write_trajectory_csv(f, traj, setup.labels);
    std::cout << "trajectory: " << traj.times.size() << " rows -> " << *g.out
              << "\n";
  } else {
    defalg::dynamics::write_trajectory_csv(std::cout, traj, setup.labels);
    summary = &std::cerr;
  }
  if (setup.integrals.empty()) {
    *summary << "no tracked first integrals\n";
  }
  for (const auto& integral : setup.integrals) {
    *summary << "drift " << integral.label << " = "
             << format_value(
                    defalg::dynamics::first_integral_drift(traj, integral.value))
             << "\n";
  }
  return 0;
}

int cmd_fit_integral(const std::string& name, std::optional<int> degree,
                     std::optional<int> ensemble, const GlobalOptions& g) {
  defalg::scenario::DynamicsSetup setup = defalg::scenario::dynamics_setup(name);
  const int deg = degree.value_or(setup.default_degree);
  const int count = ensemble.value_or(setup.default_ensemble);
  const std::uint64_t seed = g.seed.value_or(setup.default_ensemble_seed);
  std::vector<defalg::dynamics::Trajectory> trajs =
      defalg::scenario::run_ensemble(setup, count, seed, setup.ensemble_t1,
                                     setup.ensemble_step,
                                     setup.ensemble_stride);
  std::vector<defalg::dynamics::BasisFunction> basis =
      defalg::dynamics::monomial_basis(static_cast<int>(setup.labels.size()),
                                       setup.basis_coords, setup.basis_labels,
                                       deg);
  defalg::dynamics::IntegralFit fit =
      defalg::dynamics::fit_first_integral(setup.system, trajs, basis);
  std::cout << "normalized residual = " << format_value(fit.residual) << "\n";
  std::cout << "null directions = " << fit.null_directions.cols() << "\n";
  std::cout << "coefficients:\n";
  for (int k = 0; k < fit.coefficients.size(); ++k) {
    std::cout << "  " << basis[static_cast<std::size_t>(k)].name << " = "
              << format_value(fit.coefficients[k]) << "\n";
  }
  return 0;
}

int cmd_fit_metric(const std::string& name, std::optional<int> degree) {
  defalg::scenario::DynamicsSetup setup = defalg::scenario::dynamics_setup(name);
  std::vector<defalg::dynamics::AnsatzTerm> terms =
      defalg::dynamics::polynomial_ansatz(
          setup.chart, setup.ansatz_vars,
          degree.value_or(setup.default_ansatz_degree));
  defalg::dynamics::MetricFit fit =
      defalg::dynamics::metric_ansatz_fit(setup.connection, terms);
  std::cout << "residual = " << format_value(fit.residual) << "\n";
  std::cout << "positive definite = " << (fit.positive_definite ? "yes" : "no")
            << "\n";
  std::cout << "discarded null directions = " << fit.discarded_directions
            << "\n";
  std::cout << "coefficients:\n";
  for (int k = 0; k < fit.coefficients.size(); ++k) {
    std::cout << "  " << terms[static_cast<std::size_t>(k)].name << " = "
              << format_value(fit.coefficients[k]) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformation-tensor scenario runner"};
  // The step-size flag of `integrate` is spelled --h, so help must not claim
  // the short -h name anywhere.
  app.set_help_flag("--help", "Print help and exit");
  app.set_version_flag("--version", defalg::kVersion);
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--tol", global.tol,
                 "Override every check and classification tolerance");
  app.add_option("--samples", global.samples,
                 "Override the chart sample count");
  app.add_option("--seed", global.seed,
                 "Override the sampling or ensemble seed");
  app.add_option("--out", global.out, "Write the report or CSV to this file");

  std::string run_arg;
  CLI::App* run = app.add_subcommand(
      "run", "Run a bundled scenario or a scenario file and emit the report");
  run->add_option("scenario", run_arg, "Bundled name or path to a JSON file")
      ->required();
  run->fallthrough();

  CLI::App* list = app.add_subcommand(
      "list-scenarios", "List the bundled scenarios and their anchors");
  list->fallthrough();

  std::string integrate_name;
  std::optional<double> integrate_t1;
  std::optional<double> integrate_h;
  std::optional<int> integrate_stride;
  CLI::App* integrate = app.add_subcommand(
      "integrate", "Integrate a dynamics scenario and report drifts");
  integrate->set_help_flag("--help", "Print help and exit");
  integrate->add_option("--scenario", integrate_name, "bates or halphen")
      ->required();
  integrate->add_option("--t1", integrate_t1, "Final time");
  integrate->add_option("--h", integrate_h, "Step size");
  integrate->add_option("--stride", integrate_stride,
                        "Keep every n-th state");
  integrate->fallthrough();

  std::string fiti_name;
  std::optional<int> fiti_degree;
  std::optional<int> fiti_ensemble;
  CLI::App* fiti = app.add_subcommand(
      "fit-integral",
      "Fit a polynomial first integral over a trajectory ensemble");
  fiti->add_option("--scenario", fiti_name, "bates or halphen")->required();
  fiti->add_option("--degree", fiti_degree, "Maximum monomial degree");
  fiti->add_option("--ensemble", fiti_ensemble, "Trajectory count");
  fiti->fallthrough();

  std::string fitm_name;
  std::optional<int> fitm_degree;
  CLI::App* fitm = app.add_subcommand(
      "fit-metric",
      "Fit a compatible metric ansatz to an autoparallel connection");
  fitm->add_option("--scenario", fitm_name, "bates or halphen")->required();
  fitm->add_option("--ansatz-degree", fitm_degree,
                   "Polynomial degree of the metric entries");
  fitm->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_arg, global);
    if (list->parsed()) return cmd_list();
    if (integrate->parsed())
      return cmd_integrate(integrate_name, integrate_t1, integrate_h,
                           integrate_stride, global);
    if (fiti->parsed())
      return cmd_fit_integral(fiti_name, fiti_degree, fiti_ensemble, global);
    if (fitm->parsed()) return cmd_fit_metric(fitm_name, fitm_degree);
  } catch (const defalg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const defalg::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
