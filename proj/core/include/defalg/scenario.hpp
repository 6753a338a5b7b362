#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "defalg/connection.hpp"
#include "defalg/dynamics.hpp"
#include "defalg/rng.hpp"

namespace defalg::scenario {

// One bundled scenario: a name for the CLI, the condition anchor it
// exercises (an opaque label echoed into reports), and the JSON text.
struct BuiltinScenario {
  std::string name;
  std::string anchor;
  const char* text = nullptr;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

// Lookup by name; nullptr when the name is not bundled.
const BuiltinScenario* find_builtin(const std::string& name);

// Command-line overrides applied on top of the scenario document. A set
// tolerance replaces every check tolerance (and the classification
// tolerance); samples and seed replace the chart sampling parameters, and
// seed also reseeds dynamics ensembles.
struct RunOptions {
  std::optional<double> tolerance;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

// Result of one scenario run. `report` is the serialized JSON report;
// rendering is deterministic, so equal inputs produce byte-identical
// reports. Exit codes: 0 all verdicted checks passed, 1 at least one
// verdicted check failed, 3 a numerical failure interrupted evaluation
// (the report then carries the diagnostic and whatever checks completed).
// Configuration problems (malformed JSON, missing fields, unknown ops)
// throw ConfigError instead, which callers map to exit code 2 with no
// report body.
struct RunOutcome {
  std::string report;
  int exit_code = 0;
};

RunOutcome run_scenario_text(const std::string& json_text,
                             const RunOptions& opts = {});

// --- dynamics subcommand support -------------------------------------------

// A conserved quantity tracked along trajectories of one system.
struct TrackedIntegral {
  std::string label;
  std::function<double(const Eigen::VectorXd&)> value;
};

// Everything a driver needs to integrate one of the bundled second-order
// systems and run the two fitting pipelines against it: the right-hand
// side, default integration window, CSV labels, tracked first integrals,
// the monomial basis for integral fitting with its trajectory-ensemble
// defaults, and the chart/connection pair for metric-ansatz fitting.
struct DynamicsSetup {
  std::string name;
  dynamics::Rhs system;
  Eigen::VectorXd default_state;
  double default_t1 = 1.0;
  double default_step = 1e-3;
  int default_stride = 1;
  std::vector<std::string> labels;
  std::vector<TrackedIntegral> integrals;
  std::vector<int> basis_coords;
  std::vector<std::string> basis_labels;
  int default_degree = 4;
  int default_ensemble = 8;
  std::uint64_t default_ensemble_seed = 7;
  double ensemble_t1 = 5.0;
  double ensemble_step = 1e-3;
  int ensemble_stride = 25;
  std::function<Eigen::VectorXd(Rng&)> draw_start;
  Chart chart;
  Connection connection;
  std::vector<int> ansatz_vars;
  int default_ansatz_degree = 2;
};

// Setup for "bates" or "halphen"; anything else throws ConfigError.
DynamicsSetup dynamics_setup(const std::string& name);

// Integrates `count` trajectories from starts drawn with Rng(seed + i),
// one fresh generator per trajectory.
std::vector<dynamics::Trajectory> run_ensemble(const DynamicsSetup& s,
                                               int count, std::uint64_t seed,
                                               double t1, double step,
                                               int stride);

}  // namespace defalg::scenario
