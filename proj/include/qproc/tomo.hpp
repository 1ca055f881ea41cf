// State and process tomography on simulated or ingested data.
#pragma once

#include "qproc/prep.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qproc {

enum class Protocol { Stochastic, Projective, AncillaAssisted, PseudoPure, External };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct TomographyRow {
  /// Preparation kind for display; the map itself when it is known.
  std::string label;
  std::optional<PreparationMap> prep;
  double probability = 1.0;
  ComplexMatrix input;
  ComplexMatrix output;
};

struct TomographyRecord {
  Protocol protocol = Protocol::External;
  std::vector<TomographyRow> rows;

  /// System dimension, from the first row. Throws on an empty record.
  int dim() const;
};

struct StateEstimate {
  ComplexMatrix matrix;
  bool psd = true;
};

/// rho = I/d + (1/2) sum_j <B_j> B_j over pauli_basis(d). With `shots`, each
/// <B_j> is the mean of `shots` sampled eigenvalue outcomes of B_j (binomial
/// for qubits). The estimate is returned unclamped.
StateEstimate state_tomography(const ComplexMatrix& rho, std::optional<long> shots = std::nullopt,
                               std::uint64_t seed = 0);

/// Biorthogonal duals Tr[D_m^dagger P_n] = delta_mn from the Gram matrix.
std::vector<ComplexMatrix> dual_set(const std::vector<ComplexMatrix>& inputs);

/// Generalized process equation: Q = Tr_E[U R U^dagger] for each prepared R.
TomographyRecord simulate_process(const UnitaryOperator& u, const BipartiteState& rho_se,
                                  const std::vector<PreparationMap>& preps,
                                  Protocol protocol = Protocol::Stochastic, const Tolerances& tol = {});

/// Same, for states already prepared.
TomographyRecord simulate_prepared(const UnitaryOperator& u, const std::vector<PreparedState>& prepared,
                                   Protocol protocol, const std::vector<std::string>& labels = {});

/// Output of one prepared total state.
ComplexMatrix evolve_reduced(const UnitaryOperator& u, const BipartiteState& total);

/// Lambda(r r', s s') = sum_m Q_m(r, s) conj(D_m(r', s')) with exactly d^2
/// inputs; least squares with more. Throws LinearDependence when the inputs
/// do not span the operator space.
SuperOp reconstruct_linear_map(const TomographyRecord& record);

/// Same reconstruction from explicit duals (which need not be the record's
/// own). Used to study mismatched duals.
SuperOp reconstruct_with_duals(const std::vector<ComplexMatrix>& outputs, const std::vector<ComplexMatrix>& duals);

struct LinearFit {
  SuperOp map;
  /// Rank of the input set as vectors.
  int rank;
  /// max_m |Lambda(P_m) - Q_m|.
  double residual;
};

/// Minimum-norm least-squares map; never fails on rank deficiency.
LinearFit fit_linear_map(const TomographyRecord& record);

/// max over rows of |Lambda(P_m) - Q_m|.
double interpolation_residual(const SuperOp& map, const TomographyRecord& record);

struct LinearityReport {
  ComplexMatrix predicted;
  ComplexMatrix actual;
  double deviation;
};

/// Reconstruct from `family`, predict the probe's output, and compare with
/// simulating the probe directly.
LinearityReport linearity_check(const UnitaryOperator& u, const BipartiteState& rho_se,
                                const std::vector<PreparationMap>& family, const PreparationMap& probe,
                                const Tolerances& tol = {});

/// Ancilla-assisted tomography on A (x) S (x) E.
struct AncillaProtocol {
  UnitaryOperator entangler;  // on A (x) S
  DensityMatrix ancilla;
  DensityMatrix system;
  /// Rank-1 projectors on the ancilla.
  std::vector<ComplexMatrix> ancilla_measurements;

  /// rho_AS = V (rho_A (x) rho_S) V^dagger.
  ComplexMatrix joint_state() const;
};

/// Bell-pair protocol on two qubits whose conditional inputs are `inputs`
/// (each rank 1): J_m = conj(P_m).
AncillaProtocol bell_protocol(const std::vector<DensityMatrix>& inputs);

/// Condition on each ancilla outcome: P_m = Tr_A[J rho_AS] / p and
/// Q_m = Tr_A Tr_E[J U (rho_AS (x) rho_E) U^dagger J] / p.
TomographyRecord ancilla_assisted_qpt(const AncillaProtocol& protocol, const UnitaryOperator& u,
                                      const DensityMatrix& rho_e, const Tolerances& tol = {});

}  // namespace qproc
