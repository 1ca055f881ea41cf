// JSON schemas for matrices, maps, records, M-maps and scenario results.
//
// A matrix is {"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major
// order; a plain number is accepted for a real entry. Malformed documents
// raise Error(InvalidArgument).
#pragma once

#include "qproc/scenarios.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qproc {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// {"dim", "form": "A"|"B", "entries"}.
Json superop_to_json(const SuperOp& s);
SuperOp superop_from_json(const Json& j);

/// {"dim", "entries"} with d^3 x d^3 entries.
Json mmap_to_json(const MMapTensor& m);
MMapTensor mmap_from_json(const Json& j);

/// {"kind", "params"}. Params by kind:
///   pin:        target (matrix) or bloch [a1, a2, a3]; optional environment
///               (matrix) or environment_bloch
///   rotation:   unitary (matrix), to_bloch [a1, a2, a3] or control_error e
///   projective: projector (matrix) or bloch
///   identity:   dim
///   composite:  steps [prep, ...]
Json preparation_to_json(const PreparationMap& p);
PreparationMap preparation_from_json(const Json& j);

/// {"protocol", "rows": [{"label", "probability", "input", "output", "prep"?}]}.
Json record_to_json(const TomographyRecord& r);
TomographyRecord record_from_json(const Json& j);

/// {"blocks": {"D1": matrix, ...}, "residual"}.
Json partial_mmap_to_json(const PartialMMap& p);
PartialMMap partial_mmap_from_json(const Json& j);

Json positivity_to_json(const PositivityClass& p);
Json sum_rules_to_json(const SumRuleReport& r);
Json scenario_to_json(const ScenarioResult& r);

/// Scenario curves as CSV: header two_omega_t,<columns>; 12 significant digits.
std::string scenario_to_csv(const ScenarioResult& r);

struct SimulationConfig {
  UnitaryOperator unitary;
  BipartiteState state;
  std::vector<PreparationMap> preparations;
  Protocol protocol = Protocol::Stochastic;
  /// Finite-shot state tomography of each output when set.
  std::optional<long> shots;
  std::uint64_t seed = 0;
};

/// {"U": {"kind": "heisenberg_swap", "omega_t"} | {"matrix"},
///  "rhoSE": {"family": {"a", "b"?, "c"?, "c23"?}} |
///           {"matrix", "dim_system", "dim_environment"},
///  "preps": [prep, ...], "protocol"?, "shots"?, "seed"?}
SimulationConfig simulation_config_from_json(const Json& j, const Tolerances& tol = {});

/// Record for the configuration. Deterministic given the seed.
TomographyRecord simulate(const SimulationConfig& config, const Tolerances& tol = {});

/// Projection probabilities of a set of prepared qubit states, one row per
/// projector P(j, +/-) and one column per state.
struct PolarizationTable {
  std::string source;
  std::vector<std::string> projectors;
  std::vector<std::string> states;
  /// probabilities[projector][state].
  std::vector<std::vector<double>> probabilities;

  /// Bloch vector implied by each state's projections. A component without
  /// a measured projector is left at zero.
  std::vector<BlochVector> implied_bloch_vectors() const;
};

Json polarization_to_json(const PolarizationTable& t);
PolarizationTable polarization_from_json(const Json& j);

/// Parse a whole file; errors name the path.
Json read_json_file(const std::string& path);

/// Write via a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace qproc
