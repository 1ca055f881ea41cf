#include "qproc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

namespace qproc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::NonHermitian: return "non-hermitian";
    case ErrorKind::NonUnitary: return "non-unitary";
    case ErrorKind::NonPhysical: return "non-physical";
    case ErrorKind::NotCompletelyPositive: return "not-completely-positive";
    case ErrorKind::LinearDependence: return "linear-dependence";
    case ErrorKind::Incompatible: return "incompatible";
    case ErrorKind::ZeroProbability: return "zero-probability";
    case ErrorKind::MissingRows: return "missing-rows";
    case ErrorKind::ProtocolDegenerate: return "protocol-degenerate";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnknownScenario: return "unknown-scenario";
  }
  return "unknown";
}

Tolerances Tolerances::from_environment() {
  Tolerances tol;
  if (const char* env = std::getenv("QPROC_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string("QPROC_TOL must be a positive decimal, got '") + env + "'");
    }
    tol.hermiticity = v;
    tol.trace = v;
    tol.unitarity = v;
    tol.psd = v / 10.0;
  }
  return tol;
}

ComplexVector vec(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index s = 0; s < m.cols(); ++s) v(r * m.cols() + s) = m(r, s);
  }
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(ErrorKind::DimensionMismatch, "unvec: vector length is not dim^2");
  }
  ComplexMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int s = 0; s < dim; ++s) m(r, s) = v(r * dim + s);
  }
  return m;
}

int exact_sqrt(Eigen::Index n) {
  const auto root = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (root * root != n) {
    throw Error(ErrorKind::InvalidDimension, "size " + std::to_string(n) + " is not a perfect square");
  }
  return static_cast<int>(root);
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.adjoint() * b).trace();
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorKind::InvalidDimension, "density matrix must be square and non-empty");
  }
  if (!all_finite(m_)) throw Error(ErrorKind::NonFinite, "density matrix has NaN/Inf entries");
  if (const double h = hermiticity_residual(m_); h > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix not Hermitian (residual " << h << ")";
    throw Error(ErrorKind::NonHermitian, os.str());
  }
  if (const double t = std::abs(m_.trace() - Complex(1.0)); t > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace differs from 1 by " << t;
    throw Error(ErrorKind::NonPhysical, os.str());
  }
  if (const double lo = min_eigenvalue(m_); lo < -tol.psd) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lo;
    throw Error(ErrorKind::NonPhysical, os.str());
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be positive");
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "pure state vector has zero norm");
  const ComplexVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int dim, int k) {
  if (k < 0 || k >= dim) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double BlochVector::norm() const { return std::sqrt(a1 * a1 + a2 * a2 + a3 * a3); }

UnitaryOperator::UnitaryOperator(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw Error(ErrorKind::InvalidDimension, "unitary must be square and non-empty");
  }
  if (!all_finite(m_)) throw Error(ErrorKind::NonFinite, "unitary has NaN/Inf entries");
  const double res = max_abs(m_.adjoint() * m_ - qproc::identity(dim()));
  if (res > tol.unitarity) {
    std::ostringstream os;
    os << "matrix is not unitary (residual " << res << ")";
    throw Error(ErrorKind::NonUnitary, os.str());
  }
}

UnitaryOperator UnitaryOperator::identity(int dim) { return UnitaryOperator(qproc::identity(dim)); }

UnitaryOperator UnitaryOperator::adjoint() const { return UnitaryOperator(m_.adjoint()); }

ComplexMatrix HermitianEigenResult::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> pauli_basis(int dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidDimension, "pauli_basis requires dim >= 2");
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(dim * dim - 1));
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      basis.push_back(std::move(m));
    }
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
      m(j, k) = -kI;
      m(k, j) = kI;
      basis.push_back(std::move(m));
    }
  }
  for (int l = 1; l < dim; ++l) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int j = 0; j < l; ++j) m(j, j) = scale;
    m(l, l) = -scale * l;
    basis.push_back(std::move(m));
  }
  return basis;
}

ComplexMatrix pauli(int j) {
  if (j < 1 || j > 3) throw Error(ErrorKind::InvalidArgument, "pauli index must be 1, 2 or 3");
  return pauli_basis(2)[static_cast<std::size_t>(j - 1)];
}

DensityMatrix bloch_to_density(const BlochVector& a) {
  if (!std::isfinite(a.a1) || !std::isfinite(a.a2) || !std::isfinite(a.a3)) {
    throw Error(ErrorKind::NonFinite, "Bloch vector has non-finite components");
  }
  if (a.a1 * a.a1 + a.a2 * a.a2 + a.a3 * a.a3 > 1.0 + 1e-12) {
    throw Error(ErrorKind::NonPhysical, "Bloch vector longer than 1");
  }
  ComplexMatrix m = identity(2);
  for (int j = 1; j <= 3; ++j) m += a[j - 1] * pauli(j);
  return DensityMatrix(0.5 * m);
}

BlochVector density_to_bloch(const ComplexMatrix& rho, const Tolerances& tol) {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw Error(ErrorKind::InvalidDimension, "density_to_bloch supports qubits only");
  }
  std::array<double, 3> a{};
  for (int j = 1; j <= 3; ++j) {
    const Complex v = (rho * pauli(j)).trace();
    if (std::abs(v.imag()) > tol.hermiticity) {
      throw Error(ErrorKind::NonHermitian, "Bloch component has an imaginary part");
    }
    a[static_cast<std::size_t>(j - 1)] = v.real();
  }
  return {a[0], a[1], a[2]};
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_system, int dim_environment,
                            Party traced) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_system) * dim_environment;
  if (dim_system < 1 || dim_environment < 1 || m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "partial_trace: matrix size is not dS * dE");
  }
  if (traced == Party::Environment) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_system, dim_system);
    for (int r = 0; r < dim_system; ++r) {
      for (int s = 0; s < dim_system; ++s) {
        Complex acc = 0.0;
        for (int a = 0; a < dim_environment; ++a) {
          acc += m(r * dim_environment + a, s * dim_environment + a);
        }
        out(r, s) = acc;
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_environment, dim_environment);
  for (int a = 0; a < dim_environment; ++a) {
    for (int b = 0; b < dim_environment; ++b) {
      Complex acc = 0.0;
      for (int r = 0; r < dim_system; ++r) {
        acc += m(r * dim_environment + a, r * dim_environment + b);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

namespace {

// Rotate the eigenvector so its first non-negligible component is real and
// positive.
void normalize_phase(Eigen::Ref<ComplexVector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

bool lexicographic_less(const ComplexVector& x, const ComplexVector& y) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i).real() != y(i).real()) return x(i).real() < y(i).real();
    if (x(i).imag() != y(i).imag()) return x(i).imag() < y(i).imag();
  }
  return false;
}

}  // namespace

HermitianEigenResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidDimension, "hermitian_eig: not square");
  if (!all_finite(m)) throw Error(ErrorKind::NonFinite, "hermitian_eig: non-finite entries");
  if (const double h = hermiticity_residual(m); h > tol.hermiticity) {
    std::ostringstream os;
    os << "hermitian_eig: input not Hermitian (residual " << h << ")";
    throw Error(ErrorKind::NonHermitian, os.str());
  }
  const Eigen::Index n = m.rows();
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFinite, "hermitian_eig: eigensolver failed");
  }
  ComplexMatrix vecs = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) normalize_phase(vecs.col(k));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const RealVector& vals = solver.eigenvalues();
  constexpr double kTie = 1e-12;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (std::abs(vals(i) - vals(j)) > kTie) return vals(i) > vals(j);
    return lexicographic_less(vecs.col(i), vecs.col(j));
  });

  HermitianEigenResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = vals(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

UnitaryOperator expm_hermitian_generator(const ComplexMatrix& h, double t, const Tolerances& tol) {
  const HermitianEigenResult eig = hermitian_eig(h, tol);
  ComplexVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(-kI * eig.eigenvalues(k) * t);
  }
  return UnitaryOperator(eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint(), tol);
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  RealVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

ComplexMatrix heisenberg_hamiltonian() {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  for (int j = 1; j <= 3; ++j) h += kron(pauli(j), pauli(j));
  return h;
}

UnitaryOperator heisenberg_unitary(double omega_t) {
  ComplexMatrix u = identity(4);
  const ComplexMatrix id4 = identity(4);
  for (int j = 1; j <= 3; ++j) {
    u = u * (std::cos(omega_t) * id4 - kI * std::sin(omega_t) * kron(pauli(j), pauli(j)));
  }
  return UnitaryOperator(std::move(u));
}

ComplexMatrix complete_to_unitary(const ComplexMatrix& partial, const std::vector<bool>& fixed) {
  const Eigen::Index n = partial.rows();
  if (partial.cols() != n || static_cast<Eigen::Index>(fixed.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "complete_to_unitary: shape mismatch");
  }
  ComplexMatrix out = partial;
  std::vector<ComplexVector> basis;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (fixed[static_cast<std::size_t>(c)]) basis.emplace_back(out.col(c));
  }
  Eigen::Index candidate = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (fixed[static_cast<std::size_t>(c)]) continue;
    while (true) {
      if (candidate >= n) {
        throw Error(ErrorKind::LinearDependence, "complete_to_unitary: fixed columns not orthonormal");
      }
      ComplexVector v = ComplexVector::Unit(n, candidate++);
      // Two passes of modified Gram-Schmidt for stability.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) v -= b * b.dot(v);
      }
      const double norm = v.norm();
      if (norm > 1e-8) {
        v /= norm;
        out.col(c) = v;
        basis.push_back(std::move(v));
        break;
      }
    }
  }
  return out;
}

UnitaryOperator unitary_with_first_column(const ComplexVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero vector");
  ComplexMatrix partial = ComplexMatrix::Zero(psi.size(), psi.size());
  partial.col(0) = psi / n;
  std::vector<bool> fixed(static_cast<std::size_t>(psi.size()), false);
  fixed[0] = true;
  return UnitaryOperator(complete_to_unitary(partial, fixed));
}

namespace {

ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) g(r, c) = Complex(normal(gen), normal(gen));
  }
  return g;
}

}  // namespace

UnitaryOperator random_unitary(int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const ComplexMatrix g = ginibre(dim, dim, gen);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return UnitaryOperator(std::move(q));
}

DensityMatrix random_density(int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const ComplexMatrix g = ginibre(dim, dim, gen);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

ComplexVector random_pure_state(int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ComplexVector v = ginibre(dim, 1, gen).col(0);
  return v / v.norm();
}

}  // namespace qproc
