// Dense complex linear algebra for finite-dimensional open quantum systems.
//
// Composite indices are system-major throughout the library: for a bipartite
// space of dimensions (d1, d2) the pair (i, a) is stored at d2 * i + a. The
// same convention flattens a d x d matrix row-major into a d^2 vector.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qproc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

enum class ErrorKind {
  InvalidDimension,
  DimensionMismatch,
  NonFinite,
  NonHermitian,
  NonUnitary,
  NonPhysical,
  NotCompletelyPositive,
  LinearDependence,
  Incompatible,
  ZeroProbability,
  MissingRows,
  ProtocolDegenerate,
  InvalidArgument,
  UnknownScenario,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Carries the most negative eigenvalue of a map that has no Kraus form.
class NotCompletelyPositiveError : public Error {
 public:
  NotCompletelyPositiveError(double eigenvalue, const std::string& what)
      : Error(ErrorKind::NotCompletelyPositive, what), eigenvalue_(eigenvalue) {}

  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Numerical tolerances used when validating physical objects.
///
/// Every operation in this library is exact up to floating-point rounding,
/// so these only absorb rounding noise.
struct Tolerances {
  double hermiticity = 1e-9;
  double trace = 1e-9;
  double unitarity = 1e-9;
  double psd = 1e-10;
  /// Probability below which a preparation is reported impossible.
  double zero_probability = 1e-12;

  /// Defaults, optionally scaled by the QPROC_TOL environment variable.
  ///
  /// QPROC_TOL replaces the hermiticity/trace/unitarity tolerance; the PSD
  /// tolerance follows at one tenth of it.
  static Tolerances from_environment();
};

// ---------------------------------------------------------------------------
// Generic helpers (expression-friendly, templated on the Eigen type).

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
double hermiticity_residual(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m - m.adjoint());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
  return m.rows() == m.cols() && hermiticity_residual(m) <= tol;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Kronecker product with system-major composite indices:
/// (A (x) B)(r * dB + a, s * dB + b) = A(r, s) * B(a, b).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Result = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Result out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index s = 0; s < a.cols(); ++s) {
      out.block(r * b.rows(), s * b.cols(), b.rows(), b.cols()) = a(r, s) * b;
    }
  }
  return out;
}

/// Row-major vectorization: vec(M)[d * r + s] = M(r, s).
ComplexVector vec(const ComplexMatrix& m);
/// Inverse of vec for a square d x d matrix.
ComplexMatrix unvec(const ComplexVector& v, int dim);

/// Integer square root for dimension bookkeeping; throws if not a square.
int exact_sqrt(Eigen::Index n);

/// Hilbert-Schmidt inner product Tr[A^dagger B].
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(int dim);

// ---------------------------------------------------------------------------
// Domain types.

/// d x d Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  /// Validates the matrix. Throws Error(NonPhysical / NonHermitian / ...).
  explicit DensityMatrix(ComplexMatrix m, const Tolerances& tol = {});

  /// Maximally mixed state I/d.
  static DensityMatrix maximally_mixed(int dim);
  /// Pure state |psi><psi| (psi is normalized internally).
  static DensityMatrix pure(const ComplexVector& psi);
  /// |k><k| in the computational basis.
  static DensityMatrix basis_state(int dim, int k);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  /// Tr[rho^2].
  double purity() const;
  bool is_pure(double tol = 1e-9) const { return std::abs(purity() - 1.0) <= tol; }

  operator const ComplexMatrix&() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Real Bloch vector of a qubit.
struct BlochVector {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  double norm() const;
  std::array<double, 3> as_array() const { return {a1, a2, a3}; }
  double operator[](int j) const { return as_array()[static_cast<std::size_t>(j)]; }
};

/// Square unitary matrix.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m, const Tolerances& tol = {});

  static UnitaryOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  UnitaryOperator adjoint() const;

  operator const ComplexMatrix&() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
struct HermitianEigenResult {
  RealVector eigenvalues;
  /// Columns are eigenvectors in the order of `eigenvalues`.
  ComplexMatrix eigenvectors;

  double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues.minCoeff() : 0.0; }
  ComplexMatrix reconstruct() const;
};

/// Two-party bookkeeping for a square matrix on H_S (x) H_E.
enum class Party { System, Environment };

// ---------------------------------------------------------------------------
// Operations.

/// Generalized Gell-Mann basis: d^2 - 1 traceless Hermitian matrices with
/// Tr[B_i B_j] = 2 delta_ij, ordered symmetric, antisymmetric, diagonal.
/// For d = 2 this is exactly (sigma_1, sigma_2, sigma_3).
std::vector<ComplexMatrix> pauli_basis(int dim);

/// Pauli matrix sigma_j for j in {1, 2, 3}.
ComplexMatrix pauli(int j);

/// (I + a . sigma) / 2.
DensityMatrix bloch_to_density(const BlochVector& a);
/// a_j = Tr[rho sigma_j]. Qubits only.
BlochVector density_to_bloch(const ComplexMatrix& rho, const Tolerances& tol = {});

/// Partial trace of a (dS * dE)-square matrix. `traced` is the party removed.
ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_system, int dim_environment,
                            Party traced);

HermitianEigenResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = {});

/// Smallest eigenvalue of a Hermitian matrix (after explicit symmetrization).
double min_eigenvalue(const ComplexMatrix& m);

/// U = exp(-i H t) for Hermitian H.
UnitaryOperator expm_hermitian_generator(const ComplexMatrix& h, double t,
                                         const Tolerances& tol = {});

/// Positive square root of a PSD matrix (negative rounding noise clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Heisenberg exchange coupling H = sum_j sigma_j (x) sigma_j on two qubits.
ComplexMatrix heisenberg_hamiltonian();

/// exp(-i t sum_j sigma_j (x) sigma_j) as the product of commuting factors
/// prod_j (cos t I - i sin t sigma_j (x) sigma_j). `omega_t` is omega * t.
UnitaryOperator heisenberg_unitary(double omega_t);

/// A unitary whose first column is psi (normalized); remaining columns are
/// completed by Gram-Schmidt over the computational basis.
UnitaryOperator unitary_with_first_column(const ComplexVector& psi);

/// Complete a set of orthonormal columns to a unitary. `fixed` marks which
/// columns of `partial` are already set; the rest are filled by Gram-Schmidt
/// over the canonical basis in index order.
ComplexMatrix complete_to_unitary(const ComplexMatrix& partial, const std::vector<bool>& fixed);

/// Haar-random unitary from a seeded generator (QR of a Ginibre matrix).
UnitaryOperator random_unitary(int dim, std::uint64_t seed);
/// Random density matrix of full rank (Ginibre ensemble), seeded.
DensityMatrix random_density(int dim, std::uint64_t seed);
/// Haar-random pure state, seeded.
ComplexVector random_pure_state(int dim, std::uint64_t seed);

}  // namespace qproc
