#include "qproc/maps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qproc {

const char* to_string(MapForm form) { return form == MapForm::A ? "A" : "B"; }

const char* to_string(PositivityTag tag) {
  switch (tag) {
    case PositivityTag::CompletelyPositive: return "CompletelyPositive";
    case PositivityTag::PositiveNotCP: return "PositiveNotCP";
    case PositivityTag::Negative: return "Negative";
  }
  return "unknown";
}

SuperOp::SuperOp(int dim, MapForm form, ComplexMatrix matrix)
    : dim_(dim), form_(form), m_(std::move(matrix)) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "superoperator dimension must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  if (m_.rows() != n || m_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "superoperator matrix must be d^2 x d^2");
  }
  if (!all_finite(m_)) throw Error(ErrorKind::NonFinite, "superoperator has NaN/Inf entries");
}

SuperOp SuperOp::identity(int dim, MapForm form) {
  return SuperOp(dim, MapForm::A, qproc::identity(dim * dim)).to(form);
}

SuperOp SuperOp::unitary(const ComplexMatrix& v, MapForm form) {
  if (v.rows() != v.cols()) throw Error(ErrorKind::InvalidDimension, "unitary map needs a square matrix");
  return SuperOp(static_cast<int>(v.rows()), MapForm::A, kron(v, v.conjugate())).to(form);
}

SuperOp SuperOp::from_kraus(const std::vector<ComplexMatrix>& kraus, MapForm form) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus set");
  const auto d = kraus.front().rows();
  ComplexMatrix a = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw Error(ErrorKind::DimensionMismatch, "Kraus shapes differ");
    a += kron(k, k.conjugate());
  }
  return SuperOp(static_cast<int>(d), MapForm::A, std::move(a)).to(form);
}

SuperOp SuperOp::transpose(int dim, MapForm form) {
  ComplexMatrix a = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (int r = 0; r < dim; ++r) {
    for (int s = 0; s < dim; ++s) a(dim * r + s, dim * s + r) = 1.0;
  }
  return SuperOp(dim, MapForm::A, std::move(a)).to(form);
}

SuperOp SuperOp::to(MapForm form) const { return form == form_ ? *this : reshuffle(*this); }

ComplexMatrix SuperOp::a_matrix() const {
  return form_ == MapForm::A ? m_ : ComplexMatrix(reshuffle_matrix(m_, dim_));
}

ComplexMatrix SuperOp::b_matrix() const {
  return form_ == MapForm::B ? m_ : ComplexMatrix(reshuffle_matrix(m_, dim_));
}

double SuperOp::trace_preservation_residual() const {
  const ComplexMatrix b = b_matrix();
  double worst = 0.0;
  for (int rp = 0; rp < dim_; ++rp) {
    for (int sp = 0; sp < dim_; ++sp) {
      Complex acc = 0.0;
      for (int n = 0; n < dim_; ++n) acc += b(dim_ * n + rp, dim_ * n + sp);
      worst = std::max(worst, std::abs(acc - Complex(rp == sp ? 1.0 : 0.0)));
    }
  }
  return worst;
}

SuperOp reshuffle(const SuperOp& s) {
  return SuperOp(s.dim(), s.form() == MapForm::A ? MapForm::B : MapForm::A,
                 reshuffle_matrix(s.matrix(), s.dim()));
}

ComplexMatrix apply(const SuperOp& s, const ComplexMatrix& rho) {
  if (rho.rows() != s.dim() || rho.cols() != s.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "apply: state dimension does not match the map");
  }
  return unvec(s.a_matrix() * vec(rho), s.dim());
}

SuperOp compose(const SuperOp& s2, const SuperOp& s1) {
  if (s2.dim() != s1.dim()) throw Error(ErrorKind::DimensionMismatch, "compose: dimensions differ");
  return SuperOp(s2.dim(), MapForm::A, s2.a_matrix() * s1.a_matrix()).to(s2.form());
}

ComplexMatrix KrausSet::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& c : operators) out += c * rho * c.adjoint();
  return out;
}

ComplexMatrix KrausSet::completeness() const {
  if (operators.empty()) return {};
  ComplexMatrix out = ComplexMatrix::Zero(operators.front().cols(), operators.front().cols());
  for (const auto& c : operators) out += c.adjoint() * c;
  return out;
}

KrausSet kraus_decompose(const SuperOp& s, const Tolerances& tol) {
  const HermitianEigenResult eig = hermitian_eig(s.b_matrix(), tol);
  const double lowest = eig.min_eigenvalue();
  if (lowest < -tol.psd) {
    std::ostringstream os;
    os << "map is not completely positive: B-form eigenvalue " << lowest;
    throw NotCompletelyPositiveError(lowest, os.str());
  }
  KrausSet out;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    // Eigenvalues within rounding of zero carry no Kraus operator.
    if (lambda <= tol.psd) continue;
    out.operators.push_back(std::sqrt(lambda) * unvec(eig.eigenvectors.col(k), s.dim()));
    out.weights.push_back(lambda);
  }
  return out;
}

std::vector<BlochVector> fibonacci_sphere(int count) {
  std::vector<BlochVector> pts;
  if (count <= 0) return pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    pts.push_back({rad * std::cos(phi), rad * std::sin(phi), z});
  }
  return pts;
}

PositivityClass classify_positivity(const SuperOp& s, int samples, const Tolerances& tol) {
  PositivityClass out;
  const ComplexMatrix b = s.b_matrix();
  out.min_eigenvalue = min_eigenvalue(b);
  if (out.min_eigenvalue >= -tol.psd) {
    out.tag = PositivityTag::CompletelyPositive;
    return out;
  }

  std::vector<ComplexMatrix> probes;
  if (s.dim() == 2) {
    for (const auto& p : fibonacci_sphere(samples)) probes.push_back(bloch_to_density(p).matrix());
  } else {
    for (int i = 0; i < samples; ++i) {
      const ComplexVector psi = random_pure_state(s.dim(), 0x5eedULL + static_cast<std::uint64_t>(i));
      probes.push_back(psi * psi.adjoint());
    }
  }
  out.samples_checked = static_cast<int>(probes.size());

  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double lo = min_eigenvalue(qproc::apply(s, probes[i]));
    if (lo < worst) {
      worst = lo;
      worst_index = i;
    }
  }
  out.min_output_eigenvalue = worst;
  if (!probes.empty() && worst < -tol.psd) {
    out.tag = PositivityTag::Negative;
    out.witness = probes[worst_index];
  } else {
    out.tag = PositivityTag::PositiveNotCP;
  }
  return out;
}

// ---------------------------------------------------------------------------

TwoQubitParams TwoQubitParams::correlated_c23(const BlochVector& a, double c23) {
  TwoQubitParams p;
  p.a = a;
  p.c[1][2] = c23;
  return p;
}

ComplexMatrix TwoQubitParams::matrix() const {
  const ComplexMatrix id = identity(2);
  ComplexMatrix m = kron(id, id);
  for (int j = 0; j < 3; ++j) {
    m += a[j] * kron(pauli(j + 1), id);
    m += b[j] * kron(id, pauli(j + 1));
    for (int k = 0; k < 3; ++k) {
      const double cjk = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (cjk != 0.0) m += cjk * kron(pauli(j + 1), pauli(k + 1));
    }
  }
  return 0.25 * m;
}

bool TwoQubitParams::only_c23() const {
  if (b.a1 != 0.0 || b.a2 != 0.0 || b.a3 != 0.0) return false;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      if ((j != 1 || k != 2) && c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] != 0.0) {
        return false;
      }
    }
  }
  return true;
}

BipartiteState::BipartiteState(int dim_system, int dim_environment, const ComplexMatrix& m,
                               const Tolerances& tol)
    : ds_(dim_system), de_(dim_environment), rho_(m, tol) {
  if (dim_system < 1 || dim_environment < 1 ||
      m.rows() != static_cast<Eigen::Index>(dim_system) * dim_environment) {
    throw Error(ErrorKind::DimensionMismatch, "bipartite state size is not dS * dE");
  }
}

BipartiteState::BipartiteState(const TwoQubitParams& params, const Tolerances& tol)
    : ds_(2), de_(2), rho_(params.matrix(), tol), params_(params) {}

BipartiteState BipartiteState::product(const ComplexMatrix& rho_s, const ComplexMatrix& rho_e) {
  return BipartiteState(static_cast<int>(rho_s.rows()), static_cast<int>(rho_e.rows()),
                        kron(rho_s, rho_e));
}

DensityMatrix BipartiteState::reduced_system() const {
  return DensityMatrix(partial_trace(matrix(), ds_, de_, Party::Environment));
}

DensityMatrix BipartiteState::reduced_environment() const {
  return DensityMatrix(partial_trace(matrix(), ds_, de_, Party::System));
}

ComplexMatrix BipartiteState::correlation_matrix() const {
  return matrix() - kron(reduced_system().matrix(), reduced_environment().matrix());
}

// ---------------------------------------------------------------------------

SuperOp map_from_contraction(const UnitaryOperator& u, const DensityMatrix& rho_e) {
  const int de = rho_e.dim();
  if (u.dim() % de != 0) {
    throw Error(ErrorKind::DimensionMismatch, "map_from_contraction: dim(U) is not a multiple of dim(rhoE)");
  }
  const int d = u.dim() / de;
  const ComplexMatrix& um = u.matrix();
  const ComplexMatrix& re = rho_e.matrix();
  // W(r e, r' b) = sum_a U(r e, r' a) rhoE(a, b); then B = sum_e W U^*.
  ComplexMatrix w = ComplexMatrix::Zero(u.dim(), u.dim());
  for (int row = 0; row < u.dim(); ++row) {
    for (int rp = 0; rp < d; ++rp) {
      for (int b = 0; b < de; ++b) {
        Complex acc = 0.0;
        for (int a = 0; a < de; ++a) acc += um(row, rp * de + a) * re(a, b);
        w(row, rp * de + b) = acc;
      }
    }
  }
  ComplexMatrix bm = ComplexMatrix::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r) {
    for (int rp = 0; rp < d; ++rp) {
      for (int s = 0; s < d; ++s) {
        for (int sp = 0; sp < d; ++sp) {
          Complex acc = 0.0;
          for (int e = 0; e < de; ++e) {
            for (int b = 0; b < de; ++b) {
              acc += w(r * de + e, rp * de + b) * std::conj(um(s * de + e, sp * de + b));
            }
          }
          bm(d * r + rp, d * s + sp) = acc;
        }
      }
    }
  }
  return SuperOp(d, MapForm::B, std::move(bm));
}

ComplexMatrix embed_system_state(const BipartiteState& rho_se, const ComplexMatrix& rho_s) {
  if (rho_s.rows() != rho_se.dim_system() || rho_s.cols() != rho_se.dim_system()) {
    throw Error(ErrorKind::DimensionMismatch, "embed: system state has the wrong dimension");
  }
  if (const auto& params = rho_se.params()) {
    TwoQubitParams p = *params;
    p.a = density_to_bloch(rho_s);
    return p.matrix();
  }
  return kron(rho_s, rho_se.reduced_environment().matrix()) + rho_se.correlation_matrix();
}

namespace {

SuperOp correlated_map(const UnitaryOperator& u, const BipartiteState& rho_se,
                       const std::vector<ComplexMatrix>& basis_inputs, const Tolerances& tol, bool require_compatible) {
  const int d = rho_se.dim_system();
  const int de = rho_se.dim_environment();
  if (u.dim() != d * de) throw Error(ErrorKind::DimensionMismatch, "unitary does not act on S (x) E");
  const auto n = static_cast<Eigen::Index>(d) * d;
  if (static_cast<Eigen::Index>(basis_inputs.size()) != n) {
    throw Error(ErrorKind::LinearDependence, "need exactly d^2 basis inputs");
  }
  ComplexMatrix x(n, n);
  ComplexMatrix y(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const ComplexMatrix& p = basis_inputs[static_cast<std::size_t>(k)];
    if (p.rows() != d) throw Error(ErrorKind::DimensionMismatch, "basis input has the wrong dimension");
    const ComplexMatrix total = embed_system_state(rho_se, p);
    if (const double lo = min_eigenvalue(total); require_compatible && lo < -tol.psd) {
      std::ostringstream os;
      os << "basis input " << k << " is outside the compatibility domain (embedded eigenvalue " << lo << ")";
      throw Error(ErrorKind::Incompatible, os.str());
    }
    const ComplexMatrix evolved = u.matrix() * total * u.matrix().adjoint();
    x.col(k) = vec(p);
    y.col(k) = vec(partial_trace(evolved, d, de, Party::Environment));
  }
  Eigen::FullPivLU<ComplexMatrix> lu(x);
  lu.setThreshold(1e-10);
  if (lu.rank() < n) throw Error(ErrorKind::LinearDependence, "basis inputs are linearly dependent");
  return SuperOp(d, MapForm::A, y * lu.inverse());
}

}  // namespace

SuperOp map_from_correlated_state(const UnitaryOperator& u, const BipartiteState& rho_se,
                                  const std::vector<DensityMatrix>& basis_inputs,
                                  const Tolerances& tol) {
  std::vector<ComplexMatrix> ms;
  for (const auto& b : basis_inputs) ms.push_back(b.matrix());
  return correlated_map(u, rho_se, ms, tol, true);
}

SuperOp dynamical_map(const UnitaryOperator& u, const BipartiteState& rho_se) {
  const int d = rho_se.dim_system();
  // pure states |j>, (|j> + |k>)/sqrt2, (|j> + i|k>)/sqrt2 span the operators
  std::vector<ComplexMatrix> ms;
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k)
      for (const Complex phase : {Complex(1.0), Complex(0.0, 1.0)}) {
        if (j == k && phase != Complex(1.0)) continue;
        ComplexVector psi = ComplexVector::Zero(d);
        psi(j) = 1.0;
        if (k != j) psi(k) = phase;
        ms.push_back(DensityMatrix::pure(psi).matrix());
      }
  return correlated_map(u, rho_se, ms, {}, false);
}

bool compatibility_check(const BipartiteState& family, const BlochVector& a, const Tolerances& tol) {
  if (const auto& params = family.params(); params && params->only_c23()) {
    const double c23 = std::abs(params->c[1][2]);
    const double lhs = a.a1 * a.a1 + std::pow(std::abs(a.a2) + c23, 2) + a.a3 * a.a3;
    return lhs <= 1.0 + 1e-12;
  }
  if (family.dim_system() != 2) {
    throw Error(ErrorKind::InvalidDimension, "Bloch-vector compatibility needs a qubit system");
  }
  ComplexMatrix rho_s = identity(2);
  for (int j = 1; j <= 3; ++j) rho_s += a[j - 1] * pauli(j);
  rho_s *= 0.5;
  return min_eigenvalue(embed_system_state(family, rho_s)) >= -tol.psd;
}

Dilation minimal_dilation(const SuperOp& s, const Tolerances& tol) {
  if (!s.is_trace_preserving(tol.trace)) {
    throw Error(ErrorKind::NonPhysical, "minimal_dilation requires a trace-preserving map");
  }
  const KrausSet kraus = kraus_decompose(s, tol);
  const int d = s.dim();
  const int de = d * d;
  const int n = d * de;
  ComplexMatrix partial = ComplexMatrix::Zero(n, n);
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  // U(r e, r' 0) = C_e(r, r'); the environment starts in |0>.
  for (int rp = 0; rp < d; ++rp) {
    const int col = rp * de;
    fixed[static_cast<std::size_t>(col)] = true;
    for (std::size_t e = 0; e < kraus.operators.size(); ++e) {
      for (int r = 0; r < d; ++r) {
        partial(r * de + static_cast<int>(e), col) = kraus.operators[e](r, rp);
      }
    }
  }
  ComplexMatrix u = complete_to_unitary(partial, fixed);
  return {UnitaryOperator(std::move(u), tol), DensityMatrix::basis_state(de, 0)};
}

}  // namespace qproc
