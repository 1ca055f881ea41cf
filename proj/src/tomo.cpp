#include "qproc/tomo.hpp"

#include <random>
#include <sstream>

namespace qproc {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Stochastic: return "Stochastic";
    case Protocol::Projective: return "Projective";
    case Protocol::AncillaAssisted: return "AncillaAssisted";
    case Protocol::PseudoPure: return "PseudoPure";
    case Protocol::External: return "External";
  }
  return "unknown";
}

Protocol protocol_from_string(const std::string& s) {
  for (Protocol p : {Protocol::Stochastic, Protocol::Projective, Protocol::AncillaAssisted, Protocol::PseudoPure,
                     Protocol::External}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown protocol '" + s + "'");
}

int TomographyRecord::dim() const {
  if (rows.empty()) throw Error(ErrorKind::MissingRows, "empty tomography record");
  return static_cast<int>(rows.front().input.rows());
}

StateEstimate state_tomography(const ComplexMatrix& rho, std::optional<long> shots, std::uint64_t seed) {
  const int d = static_cast<int>(rho.rows());
  std::mt19937_64 gen(seed);
  ComplexMatrix est = identity(d) / static_cast<double>(d);
  for (const auto& b : pauli_basis(d)) {
    double mean = 0.0;
    if (!shots) {
      mean = (rho * b).trace().real();
    } else {
      if (*shots <= 0) throw Error(ErrorKind::InvalidArgument, "shot count must be positive");
      const HermitianEigenResult eig = hermitian_eig(b);
      long remaining = *shots;
      double mass = 1.0;
      double total = 0.0;
      for (Eigen::Index k = 0; k < eig.eigenvalues.size() && remaining > 0; ++k) {
        const double pk = std::max(0.0, (eig.eigenvectors.col(k).adjoint() * rho * eig.eigenvectors.col(k))(0, 0).real());
        long count = remaining;
        if (k + 1 < eig.eigenvalues.size()) {
          const double q = mass > 0.0 ? std::clamp(pk / mass, 0.0, 1.0) : 0.0;
          count = std::binomial_distribution<long>(remaining, q)(gen);
        }
        total += static_cast<double>(count) * eig.eigenvalues(k);
        remaining -= count;
        mass -= pk;
      }
      mean = total / static_cast<double>(*shots);
    }
    est += 0.5 * mean * b;
  }
  return {est, min_eigenvalue(est) >= -Tolerances{}.psd};
}

std::vector<ComplexMatrix> dual_set(const std::vector<ComplexMatrix>& inputs) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  if (n == 0) throw Error(ErrorKind::LinearDependence, "no inputs");
  const Eigen::Index d = inputs.front().rows();
  if (n != d * d) throw Error(ErrorKind::LinearDependence, "dual set needs exactly d^2 inputs");
  ComplexMatrix gram(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) gram(m, k) = hs_inner(inputs[m], inputs[k]);
  Eigen::FullPivLU<ComplexMatrix> lu(gram);
  lu.setThreshold(1e-10);
  if (lu.rank() < n) throw Error(ErrorKind::LinearDependence, "inputs are linearly dependent");
  const ComplexMatrix inv = lu.inverse();
  std::vector<ComplexMatrix> duals;
  for (Eigen::Index m = 0; m < n; ++m) {
    ComplexMatrix dm = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < n; ++k) dm += inv(k, m) * inputs[static_cast<std::size_t>(k)];
    duals.push_back(std::move(dm));
  }
  return duals;
}

ComplexMatrix evolve_reduced(const UnitaryOperator& u, const BipartiteState& total) {
  if (u.dim() != total.dim_system() * total.dim_environment()) {
    throw Error(ErrorKind::DimensionMismatch, "unitary does not act on S (x) E");
  }
  const ComplexMatrix out = u.matrix() * total.matrix() * u.matrix().adjoint();
  ComplexMatrix q = partial_trace(out, total.dim_system(), total.dim_environment(), Party::Environment);
  return 0.5 * (q + q.adjoint());
}

TomographyRecord simulate_prepared(const UnitaryOperator& u, const std::vector<PreparedState>& prepared,
                                   Protocol protocol, const std::vector<std::string>& labels) {
  TomographyRecord rec;
  rec.protocol = protocol;
  for (std::size_t m = 0; m < prepared.size(); ++m) {
    TomographyRow row;
    row.label = m < labels.size() ? labels[m] : to_string(protocol);
    row.probability = prepared[m].probability;
    row.input = prepared[m].input.matrix();
    row.output = evolve_reduced(u, prepared[m].total);
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

TomographyRecord simulate_process(const UnitaryOperator& u, const BipartiteState& rho_se,
                                  const std::vector<PreparationMap>& preps, Protocol protocol,
                                  const Tolerances& tol) {
  TomographyRecord rec;
  rec.protocol = protocol;
  for (const auto& prep : preps) {
    const PreparedState ps = apply_preparation(prep, rho_se, tol);
    TomographyRow row;
    row.label = prep.label();
    row.prep = prep;
    row.probability = ps.probability;
    row.input = ps.input.matrix();
    row.output = evolve_reduced(u, ps.total);
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

SuperOp reconstruct_with_duals(const std::vector<ComplexMatrix>& outputs, const std::vector<ComplexMatrix>& duals) {
  if (outputs.size() != duals.size() || outputs.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "outputs and duals differ in number");
  }
  const int d = static_cast<int>(outputs.front().rows());
  // A = sum_m vec(Q_m) vec(D_m)^dagger, so A vec(P_n) = Q_n.
  ComplexMatrix a = ComplexMatrix::Zero(d * d, d * d);
  for (std::size_t m = 0; m < outputs.size(); ++m) a += vec(outputs[m]) * vec(duals[m]).adjoint();
  return SuperOp(d, MapForm::A, std::move(a)).to(MapForm::B);
}

namespace {

struct Columns {
  ComplexMatrix x;
  ComplexMatrix y;
};

Columns stack(const TomographyRecord& record) {
  const int d = record.dim();
  const auto n = static_cast<Eigen::Index>(record.rows.size());
  Columns c{ComplexMatrix(d * d, n), ComplexMatrix(d * d, n)};
  for (Eigen::Index m = 0; m < n; ++m) {
    const auto& row = record.rows[static_cast<std::size_t>(m)];
    if (row.input.rows() != d || row.output.rows() != d) {
      throw Error(ErrorKind::DimensionMismatch, "record rows differ in dimension");
    }
    c.x.col(m) = vec(row.input);
    c.y.col(m) = vec(row.output);
  }
  return c;
}

}  // namespace

double interpolation_residual(const SuperOp& map, const TomographyRecord& record) {
  double worst = 0.0;
  for (const auto& row : record.rows) worst = std::max(worst, max_abs(apply(map, row.input) - row.output));
  return worst;
}

LinearFit fit_linear_map(const TomographyRecord& record) {
  const int d = record.dim();
  const Columns c = stack(record);
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(c.x.adjoint());
  cod.setThreshold(1e-10);
  // A X = Y  <=>  X^dagger A^dagger = Y^dagger
  const ComplexMatrix a = cod.solve(c.y.adjoint()).adjoint();
  SuperOp map(d, MapForm::A, a);
  LinearFit fit{map.to(MapForm::B), static_cast<int>(cod.rank()), 0.0};
  fit.residual = interpolation_residual(fit.map, record);
  return fit;
}

SuperOp reconstruct_linear_map(const TomographyRecord& record) {
  const int d = record.dim();
  const std::size_t n = record.rows.size();
  if (n < static_cast<std::size_t>(d * d)) {
    std::ostringstream os;
    os << "need at least " << d * d << " inputs, record has " << n;
    throw Error(ErrorKind::LinearDependence, os.str());
  }
  if (n == static_cast<std::size_t>(d * d)) {
    std::vector<ComplexMatrix> inputs, outputs;
    for (const auto& row : record.rows) {
      inputs.push_back(row.input);
      outputs.push_back(row.output);
    }
    return reconstruct_with_duals(outputs, dual_set(inputs));
  }
  LinearFit fit = fit_linear_map(record);
  if (fit.rank < d * d) throw Error(ErrorKind::LinearDependence, "inputs do not span the operator space");
  return fit.map;
}

LinearityReport linearity_check(const UnitaryOperator& u, const BipartiteState& rho_se,
                                const std::vector<PreparationMap>& family, const PreparationMap& probe,
                                const Tolerances& tol) {
  const TomographyRecord rec = simulate_process(u, rho_se, family, Protocol::External, tol);
  const LinearFit fit = fit_linear_map(rec);
  const PreparedState ps = apply_preparation(probe, rho_se, tol);

  // The probe must be a combination of the family inputs.
  const Columns c = stack(rec);
  const ComplexVector target = vec(ps.input.matrix());
  const ComplexVector coeff = c.x.completeOrthogonalDecomposition().solve(target);
  if (max_abs(c.x * coeff - target) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "probe input lies outside the span of the family inputs");
  }
  LinearityReport out;
  out.predicted = apply(fit.map, ps.input.matrix());
  out.actual = evolve_reduced(u, ps.total);
  out.deviation = max_abs(out.predicted - out.actual);
  return out;
}

ComplexMatrix AncillaProtocol::joint_state() const {
  const ComplexMatrix& v = entangler.matrix();
  return v * kron(ancilla.matrix(), system.matrix()) * v.adjoint();
}

AncillaProtocol bell_protocol(const std::vector<DensityMatrix>& inputs) {
  ComplexMatrix v(4, 4);
  const double h = 1.0 / std::sqrt(2.0);
  // CNOT (ancilla controls) after a Hadamard on the ancilla
  v << h, 0, h, 0,
       0, h, 0, h,
       0, h, 0, -h,
       h, 0, -h, 0;
  AncillaProtocol p{UnitaryOperator(v), DensityMatrix::basis_state(2, 0), DensityMatrix::basis_state(2, 0), {}};
  for (const auto& in : inputs) p.ancilla_measurements.push_back(in.matrix().conjugate());
  return p;
}

TomographyRecord ancilla_assisted_qpt(const AncillaProtocol& protocol, const UnitaryOperator& u,
                                      const DensityMatrix& rho_e, const Tolerances& tol) {
  const int da = protocol.ancilla.dim();
  const int ds = protocol.system.dim();
  const int de = rho_e.dim();
  if (protocol.entangler.dim() != da * ds) throw Error(ErrorKind::DimensionMismatch, "entangler is not on A (x) S");
  if (u.dim() != ds * de) throw Error(ErrorKind::DimensionMismatch, "unitary is not on S (x) E");

  const ComplexMatrix rho_as = protocol.joint_state();
  const ComplexMatrix joint = kron(rho_as, rho_e.matrix());
  const ComplexMatrix big_u = kron(identity(da), u.matrix());
  const ComplexMatrix evolved = big_u * joint * big_u.adjoint();

  TomographyRecord rec;
  rec.protocol = Protocol::AncillaAssisted;
  for (std::size_t m = 0; m < protocol.ancilla_measurements.size(); ++m) {
    const ComplexMatrix& j = protocol.ancilla_measurements[m];
    if (j.rows() != da || max_abs(j * j - j) > tol.hermiticity || hermiticity_residual(j) > tol.hermiticity) {
      throw Error(ErrorKind::InvalidArgument, "ancilla measurement is not a projector");
    }
    const ComplexMatrix ja = kron(j, identity(ds));
    const ComplexMatrix cond_in = ja * rho_as * ja;
    const double p = cond_in.trace().real();
    if (p <= tol.zero_probability) {
      std::ostringstream os;
      os << "ancilla outcome " << m << " has zero probability";
      throw Error(ErrorKind::ZeroProbability, os.str());
    }
    const ComplexMatrix jae = kron(j, identity(ds * de));
    const ComplexMatrix cond_out = jae * evolved * jae;
    // Tr_A then Tr_E
    const ComplexMatrix out_se = partial_trace(cond_out, da, ds * de, Party::System);
    TomographyRow row;
    row.label = "ancilla";
    row.probability = p;
    row.input = partial_trace(cond_in, da, ds, Party::System) / p;
    row.output = partial_trace(out_se, ds, de, Party::Environment) / p;
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

}  // namespace qproc
