// Preparation procedures acting on the system factor of a bipartite state.
#pragma once

#include "qproc/maps.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qproc {

enum class PrepKind { Pin, Rotation, Projective, Identity, Composite };

const char* to_string(PrepKind kind);

class PreparationMap {
 public:
  /// Replace the system by `target`. The environment is left as Tr_S[rho_SE]
  /// unless an explicit post-pin environment is given.
  static PreparationMap pin(const DensityMatrix& target,
                            std::optional<DensityMatrix> environment = std::nullopt);
  static PreparationMap rotation(const UnitaryOperator& v);
  /// Rank-1 projection; not trace preserving.
  static PreparationMap projective(const DensityMatrix& p, const Tolerances& tol = {});
  static PreparationMap identity(int dim);
  /// Steps applied first to last.
  static PreparationMap composite(std::vector<PreparationMap> steps);

  PrepKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// B-form superoperator on the system.
  const SuperOp& superop() const { return superop_; }

  /// Pin target, rotation unitary or projector; empty for the others.
  const std::optional<ComplexMatrix>& operand() const { return operand_; }
  const std::optional<DensityMatrix>& environment() const { return environment_; }
  const std::vector<PreparationMap>& steps() const { return steps_; }

  /// Short human-readable description, e.g. "pin" or "projective(0.5,0,0.5)".
  std::string label() const;

 private:
  PreparationMap(PrepKind kind, int dim, SuperOp superop);

  PrepKind kind_;
  int dim_;
  SuperOp superop_;
  std::optional<ComplexMatrix> operand_;
  std::optional<DensityMatrix> environment_;
  std::vector<PreparationMap> steps_;
};

struct PreparedState {
  BipartiteState total;
  /// Normalization r of the prepared state.
  double probability;
  /// Tr_E[total].
  DensityMatrix input;
};

/// (P (x) I_E) rho_SE, normalized. Throws ZeroProbability when the trace is
/// below tol.zero_probability.
PreparedState apply_preparation(const PreparationMap& prep, const BipartiteState& rho_se,
                                const Tolerances& tol = {});

/// Unnormalized (P (x) I_E) rho_SE for a single (non-composite) superop.
ComplexMatrix apply_on_system(const SuperOp& prep, const ComplexMatrix& rho_se, int dim_system,
                              int dim_environment);

/// Pin to a pure target followed by each rotation. An empty rotation list
/// yields the pinned state alone.
std::vector<PreparedState> stochastic_input_set(const DensityMatrix& pin_target,
                                                const std::vector<UnitaryOperator>& rotations,
                                                const BipartiteState& rho_se,
                                                const Tolerances& tol = {});

/// Bloch vectors -x, +x, +y, +z scaled by `radius`: the inputs
/// P(1,-), P(1,+), P(2,+), P(3,+).
std::vector<BlochVector> tomographic_bloch_set(double radius = 1.0);
std::vector<DensityMatrix> tomographic_inputs(double radius = 1.0);

/// The four radius-p inputs. Uncorrelated: each is placed next to
/// Tr_S[rho_SE]. Correlated: each replaces the system part of rho_SE,
/// keeping its correlations.
std::vector<PreparedState> pseudo_pure_input_set(double p, const BipartiteState& rho_se, bool correlated,
                                                 const Tolerances& tol = {});

/// Real rotation taking |0> to (sqrt(1+e)|0> - sqrt(1-e)|1>)/sqrt(2), so the
/// pinned |0> becomes (1/2)(I + e sigma_3 - sqrt(1-e^2) sigma_1).
UnitaryOperator control_error_rotation(double epsilon);

/// A unitary taking |0> to psi.
UnitaryOperator rotation_to(const ComplexVector& psi);

/// Rotation taking |0> to the pure qubit state with Bloch vector `a`.
UnitaryOperator rotation_to_bloch(const BlochVector& a);

}  // namespace qproc
