// Named, parameterized process-tomography experiments on the two-qubit
// Heisenberg model, evaluated over a grid of x = 2 omega t in [0, 2 pi].
#pragma once

#include "qproc/mmap.hpp"

#include <map>
#include <string>
#include <vector>

namespace qproc {

using ScenarioParams = std::map<std::string, double>;

struct CurvePoint {
  double x;
  std::vector<double> values;
};

struct ScenarioResult {
  std::string name;
  ScenarioParams params;
  /// Names of the entries of each CurvePoint::values.
  std::vector<std::string> columns;
  std::vector<CurvePoint> curves;
  std::map<std::string, ComplexMatrix> matrices;
  std::map<std::string, std::string> verdicts;
  /// Scalar summaries (minima, maximal errors).
  std::map<std::string, double> summary;
};

std::vector<std::string> scenario_catalog();

/// Default parameters of a scenario. Throws UnknownScenario.
ScenarioParams scenario_defaults(const std::string& name);

/// Overrides must name known parameters. Pure function of its arguments.
ScenarioResult run_scenario(const std::string& name, const ScenarioParams& overrides = {});

/// x_i = 2 pi i / (n - 1), i = 0 .. n-1.
std::vector<double> scenario_grid(int points);

// Building blocks shared with the tests and the CLI.

/// Stochastic preparations: pin |0> then rotate to each Bloch vector.
std::vector<PreparationMap> stochastic_preparations(const std::vector<BlochVector>& targets);

/// The multiple-pin input set: (1/2)I pinned with environment
/// (1/2)(I + env_a3 sigma_3), then P(1,+), P(2,+), P(3,+) from pin |0>.
std::vector<PreparationMap> multiple_pin_preparations(double env_a3);

/// Inputs P(1,-) (from the faulty rotation), P(1,+), P(2,+), P(3,+).
std::vector<PreparationMap> control_error_preparations(double epsilon);

/// Twelve projections prepared stochastically: the "+" states with the
/// environment left alone, the "-" states by a second pin that resets the
/// environment to (1/2)(I + env_a3 sigma_3).
std::vector<PreparationMap> two_pin_twelve_preparations(double env_a3);

}  // namespace qproc
