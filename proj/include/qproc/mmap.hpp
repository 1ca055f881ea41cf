// The M-map: the process before any preparation, its uncorrelated reference
// and memory matrix, and its tomography for a qubit.
//
// Storage: T(flat3(r, r', r''), flat3(s, s', s'')) with
// flat3(r, r', r'') = d^2 r + d r' + r''. Contracting (r', r''; s', s'') with
// a B-form preparation gives the unnormalized output state.
#pragma once

#include "qproc/tomo.hpp"

#include <array>
#include <functional>
#include <string>

namespace qproc {

class MMapTensor {
 public:
  MMapTensor(int dim, ComplexMatrix tensor);

  int dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return t_; }
  /// Sum of the diagonal; equals d for an M-map.
  double trace() const { return t_.trace().real(); }

  static int flat3(int dim, int r, int rp, int rpp) { return dim * dim * r + dim * rp + rpp; }

 private:
  int dim_;
  ComplexMatrix t_;
};

/// T = sum U(r e, r' a) rho_SE(r'' a, s'' b) conj(U(s e, s' b)).
MMapTensor build_mmap(const UnitaryOperator& u, const BipartiteState& rho_se);

struct ContractedOutput {
  ComplexMatrix state;
  double probability;
};

/// Output state and probability for a preparation. Pins with an explicit
/// environment are not expressible through M and are rejected.
ContractedOutput contract_with_preparation(const MMapTensor& m, const PreparationMap& prep,
                                           const Tolerances& tol = {});

/// Unnormalized contraction with an arbitrary B-form preparation.
ComplexMatrix contract(const MMapTensor& m, const SuperOp& prep);

/// rho_S(r'', s'') = (1/d) sum_{r, r'} T(r r' r'', r r' s'').
DensityMatrix initial_state_from_mmap(const MMapTensor& m);

/// Lambda(r r', s s') = sum_{r''} T(r r' r'', s s' r'').
SuperOp stochastic_map_from_mmap(const MMapTensor& m);

/// L(r r' r'', s s' s'') = Lambda(r r', s s') rho_S(r'', s'').
ComplexMatrix uncorrelated_reference(const MMapTensor& m);

struct MemoryReport {
  /// K = M - L.
  ComplexMatrix k;
  /// K contracted with the identity preparation.
  ComplexMatrix chi_s_t;
  /// max-abs entry of K.
  double norm;
};

MemoryReport memory_matrix(const MMapTensor& m);

/// <A|M|B>(r, s) = sum A(r', r'') T(r r' r'', s s' s'') conj(B(s', s'')).
ComplexMatrix mmap_element(const MMapTensor& m, const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Qubit M-map tomography with projective preparations.

struct OracleSample {
  double probability;
  ComplexMatrix output;
};

/// Result of projecting the system onto the pure state with Bloch vector a.
using ProjectiveOracle = std::function<OracleSample(const BlochVector& a)>;

ProjectiveOracle mmap_oracle(const MMapTensor& m);
ProjectiveOracle simulation_oracle(const UnitaryOperator& u, const BipartiteState& rho_se);

enum class MMapProtocol { Nine, Twelve };

/// Combination blocks in order D1 D2 D3 O1 O2 O3 X12 X13 X23 with
/// Dj = <I|M|I> + <sj|M|sj>, Oj = <I|M|sj> + <sj|M|I>,
/// Xjk = <sj|M|sk> + <sk|M|sj>.
inline constexpr std::array<const char*, 9> kMMapBlockNames = {"D1", "D2", "D3", "O1", "O2",
                                                               "O3", "X12", "X13", "X23"};

/// 4 r Q = sum_i coefficient_i(a) block_i for a pure projection a.
std::array<double, 9> mmap_design_row(const BlochVector& a);

struct PartialMMap {
  std::array<ComplexMatrix, 9> blocks;
  /// Least-squares residual over the protocol rows.
  double residual = 0.0;

  /// r Q for the projection onto the pure state a. Mixed probes need
  /// <I|M|I>, which is not recovered; they are refused.
  ComplexMatrix predict(const BlochVector& a) const;
  OracleSample predict_sample(const BlochVector& a) const;
};

/// Bloch vectors of the projections, in the order
/// 1+ 1- 2+ 2- 3+ 3- 4+ 5+ 6+ [4- 5- 6-].
std::vector<BlochVector> mmap_protocol_vectors(MMapProtocol protocol);
std::vector<std::string> mmap_protocol_labels(MMapProtocol protocol);

/// Solve for the nine blocks by least squares over the protocol rows.
PartialMMap mmap_tomography(const ProjectiveOracle& oracle, MMapProtocol protocol);
PartialMMap mmap_tomography(const TomographyRecord& record);

/// Directly computed combination blocks of a known M-map.
std::array<ComplexMatrix, 9> mmap_blocks(const MMapTensor& m);

/// Twelve-projection record from an oracle (rows labelled 1+ ... 6-).
TomographyRecord twelve_projection_record(const ProjectiveOracle& oracle, Protocol protocol = Protocol::Projective);

struct RuleResult {
  std::string name;
  double residual;
  bool pass;
};

enum class SumRuleVerdict { Linear, MMap, Neither };

const char* to_string(SumRuleVerdict v);

struct SumRuleReport {
  std::array<RuleResult, 8> linear;
  std::array<RuleResult, 3> mmap;
  SumRuleVerdict verdict;
  /// max_j |r(j,+) + r(j,-) - 1|; informational.
  double completeness_residual;
};

inline constexpr double kSumRuleThreshold = 1e-8;

/// Rows are matched to the twelve projections by their input state.
SumRuleReport sum_rule_check(const TomographyRecord& record, double threshold = kSumRuleThreshold);

}  // namespace qproc
