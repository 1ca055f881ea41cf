// Superoperators in stochastic (A) and dynamical (B) form.
//
// A-form acts on the row-major vectorized state: vec(out) = A vec(in), with
// A(d*r + s, d*r' + s'). The B-form is the index reshuffle
// B(d*r + r', d*s + s') = A(d*r + s, d*r' + s'); it is Hermitian for
// Hermiticity-preserving maps and positive semidefinite exactly when the map
// is completely positive.
#pragma once

#include "qproc/core.hpp"

#include <optional>

namespace qproc {

enum class MapForm { A, B };

const char* to_string(MapForm form);

class SuperOp {
 public:
  SuperOp(int dim, MapForm form, ComplexMatrix matrix);

  /// Identity map in the requested form.
  static SuperOp identity(int dim, MapForm form = MapForm::B);
  /// rho -> V rho V^dagger.
  static SuperOp unitary(const ComplexMatrix& v, MapForm form = MapForm::B);
  /// rho -> sum_m K_m rho K_m^dagger.
  static SuperOp from_kraus(const std::vector<ComplexMatrix>& kraus, MapForm form = MapForm::B);
  /// rho -> rho^T.
  static SuperOp transpose(int dim, MapForm form = MapForm::B);

  int dim() const { return dim_; }
  MapForm form() const { return form_; }
  const ComplexMatrix& matrix() const { return m_; }

  /// Same map, other representation.
  SuperOp to(MapForm form) const;
  ComplexMatrix a_matrix() const;
  ComplexMatrix b_matrix() const;

  /// Block trace condition sum_n B(n r', n s') = delta(r', s').
  double trace_preservation_residual() const;
  bool is_trace_preserving(double tol = 1e-9) const { return trace_preservation_residual() <= tol; }

 private:
  int dim_;
  MapForm form_;
  ComplexMatrix m_;
};

/// Toggle A <-> B form. Involutive.
SuperOp reshuffle(const SuperOp& s);

/// Index permutation shared by both directions of the reshuffle.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> reshuffle_matrix(
    const Eigen::MatrixBase<Derived>& m, int dim) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.rows(), m.cols());
  for (int r = 0; r < dim; ++r) {
    for (int rp = 0; rp < dim; ++rp) {
      for (int s = 0; s < dim; ++s) {
        for (int sp = 0; sp < dim; ++sp) {
          out(dim * r + rp, dim * s + sp) = m(dim * r + s, dim * rp + sp);
        }
      }
    }
  }
  return out;
}

/// Apply the map to a d x d matrix. The result is not required to be PSD.
ComplexMatrix apply(const SuperOp& s, const ComplexMatrix& rho);

/// S2 after S1, returned in the form of S2.
SuperOp compose(const SuperOp& s2, const SuperOp& s1);

struct KrausSet {
  std::vector<ComplexMatrix> operators;
  /// Eigenvalues of the B-form that produced each operator.
  std::vector<double> weights;

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// sum_m C_m^dagger C_m.
  ComplexMatrix completeness() const;
};

/// Kraus operators C_m = sqrt(lambda_m) reshape(v_m) from the B-form
/// eigendecomposition. Throws NotCompletelyPositiveError if the B-form has
/// an eigenvalue below -tol.psd.
KrausSet kraus_decompose(const SuperOp& s, const Tolerances& tol = {});

enum class PositivityTag { CompletelyPositive, PositiveNotCP, Negative };

const char* to_string(PositivityTag tag);

struct PositivityClass {
  PositivityTag tag = PositivityTag::CompletelyPositive;
  double min_eigenvalue = 0.0;
  /// Pure state whose image has the most negative eigenvalue (Negative only).
  std::optional<ComplexMatrix> witness;
  /// Most negative output eigenvalue over the sampled pure states. Only set
  /// when the B-form is not PSD.
  std::optional<double> min_output_eigenvalue;
  /// Number of pure states probed. PositiveNotCP is a sampled verdict: a
  /// finer sample could still find a negative image.
  int samples_checked = 0;
};

/// Default number of Fibonacci-sphere probes for qubits.
inline constexpr int kDefaultPositivitySamples = 2048;

/// Eigenvalue test for complete positivity, then a deterministic sampled
/// search (Fibonacci sphere for qubits, seeded Haar states otherwise) for a
/// pure state mapped outside the PSD cone.
PositivityClass classify_positivity(const SuperOp& s, int samples = kDefaultPositivitySamples,
                                    const Tolerances& tol = {});

/// Deterministic Fibonacci-sphere points on the unit sphere.
std::vector<BlochVector> fibonacci_sphere(int count);

// ---------------------------------------------------------------------------
// Bipartite states.

/// Parameters of the two-qubit family
/// (1/4){I(x)I + a_j sigma_j(x)I + b_k I(x)sigma_k + c_jk sigma_j(x)sigma_k}.
struct TwoQubitParams {
  BlochVector a;
  BlochVector b;
  /// c[j][k] multiplies sigma_{j+1} (x) sigma_{k+1}.
  std::array<std::array<double, 3>, 3> c{};

  /// Family with b = 0 and only c23 nonzero.
  static TwoQubitParams correlated_c23(const BlochVector& a, double c23);
  ComplexMatrix matrix() const;
  bool only_c23() const;
};

/// Square density matrix on H_S (x) H_E with system-major indices.
class BipartiteState {
 public:
  BipartiteState(int dim_system, int dim_environment, const ComplexMatrix& m,
                 const Tolerances& tol = {});
  explicit BipartiteState(const TwoQubitParams& params, const Tolerances& tol = {});

  static BipartiteState product(const ComplexMatrix& rho_s, const ComplexMatrix& rho_e);

  int dim_system() const { return ds_; }
  int dim_environment() const { return de_; }
  const DensityMatrix& density() const { return rho_; }
  const ComplexMatrix& matrix() const { return rho_.matrix(); }
  const std::optional<TwoQubitParams>& params() const { return params_; }

  DensityMatrix reduced_system() const;
  DensityMatrix reduced_environment() const;
  /// chi = rho_SE - rho_S (x) rho_E.
  ComplexMatrix correlation_matrix() const;

 private:
  int ds_;
  int de_;
  DensityMatrix rho_;
  std::optional<TwoQubitParams> params_;
};

/// Map from the reduced system state of an initially uncorrelated pair:
/// B(r r', s s') = sum U(r e, r' a) rhoE(a, b) conj(U(s e, s' b)).
SuperOp map_from_contraction(const UnitaryOperator& u, const DensityMatrix& rho_e);

/// Embed a system state into the correlated total state: for the two-qubit
/// family a_j is replaced by the input's Bloch vector (b, c kept); otherwise
/// the input replaces rho_S in rho_S (x) rho_E + chi. Not necessarily PSD.
ComplexMatrix embed_system_state(const BipartiteState& rho_se, const ComplexMatrix& rho_s);

/// Dynamical map of a correlated state, built from d^2 linearly independent
/// compatible inputs by solving A vec(P_k) = vec(Q_k). Returned in A-form.
SuperOp map_from_correlated_state(const UnitaryOperator& u, const BipartiteState& rho_se,
                                  const std::vector<DensityMatrix>& basis_inputs,
                                  const Tolerances& tol = {});

/// Linear extension of rho_S -> Tr_E[U embed(rho_S) U^dagger] over all
/// operators. Defined even where no basis of compatible states exists.
/// Returned in A-form.
SuperOp dynamical_map(const UnitaryOperator& u, const BipartiteState& rho_se);

/// Whether the system state with Bloch vector `a` can be embedded in the
/// family's correlations without losing positivity.
bool compatibility_check(const BipartiteState& family, const BlochVector& a,
                         const Tolerances& tol = {});

struct Dilation {
  UnitaryOperator unitary;
  /// Pure environment state |0><0| of dimension d^2.
  DensityMatrix environment;
};

/// Unitary on H_S (x) H_E with dim E = d^2 and pure environment reproducing a
/// completely positive trace-preserving map under map_from_contraction.
Dilation minimal_dilation(const SuperOp& s, const Tolerances& tol = {});

}  // namespace qproc
