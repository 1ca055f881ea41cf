#include "qproc/prep.hpp"

#include <cmath>
#include <sstream>

namespace qproc {

const char* to_string(PrepKind kind) {
  switch (kind) {
    case PrepKind::Pin: return "pin";
    case PrepKind::Rotation: return "rotation";
    case PrepKind::Projective: return "projective";
    case PrepKind::Identity: return "identity";
    case PrepKind::Composite: return "composite";
  }
  return "unknown";
}

PreparationMap::PreparationMap(PrepKind kind, int dim, SuperOp superop)
    : kind_(kind), dim_(dim), superop_(std::move(superop)) {}

PreparationMap PreparationMap::pin(const DensityMatrix& target, std::optional<DensityMatrix> environment) {
  const int d = target.dim();
  ComplexMatrix b = ComplexMatrix::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int k = 0; k < d; ++k) b(d * r + k, d * s + k) = target.matrix()(r, s);
  PreparationMap out(PrepKind::Pin, d, SuperOp(d, MapForm::B, std::move(b)));
  out.operand_ = target.matrix();
  out.environment_ = std::move(environment);
  return out;
}

PreparationMap PreparationMap::rotation(const UnitaryOperator& v) {
  PreparationMap out(PrepKind::Rotation, v.dim(), SuperOp::unitary(v.matrix(), MapForm::B));
  out.operand_ = v.matrix();
  return out;
}

PreparationMap PreparationMap::projective(const DensityMatrix& p, const Tolerances& tol) {
  if (max_abs(p.matrix() * p.matrix() - p.matrix()) > tol.hermiticity) {
    throw Error(ErrorKind::InvalidArgument, "projective preparation needs a rank-1 projector");
  }
  const int d = p.dim();
  PreparationMap out(PrepKind::Projective, d, SuperOp::from_kraus({p.matrix()}, MapForm::B));
  out.operand_ = p.matrix();
  return out;
}

PreparationMap PreparationMap::identity(int dim) {
  return PreparationMap(PrepKind::Identity, dim, SuperOp::identity(dim, MapForm::B));
}

PreparationMap PreparationMap::composite(std::vector<PreparationMap> steps) {
  if (steps.empty()) throw Error(ErrorKind::InvalidArgument, "composite preparation needs at least one step");
  const int d = steps.front().dim();
  SuperOp total = SuperOp::identity(d, MapForm::A);
  for (const auto& s : steps) {
    if (s.dim() != d) throw Error(ErrorKind::DimensionMismatch, "composite steps differ in dimension");
    total = compose(s.superop(), total);
  }
  PreparationMap out(PrepKind::Composite, d, total.to(MapForm::B));
  out.steps_ = std::move(steps);
  return out;
}

std::string PreparationMap::label() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == PrepKind::Composite) {
    os << "(";
    for (std::size_t i = 0; i < steps_.size(); ++i) os << (i ? "," : "") << steps_[i].label();
    os << ")";
  } else if (operand_ && dim_ == 2 && kind_ != PrepKind::Rotation) {
    const BlochVector a = density_to_bloch(*operand_);
    os.precision(4);
    os << "(" << a.a1 << "," << a.a2 << "," << a.a3 << ")";
  }
  return os.str();
}

ComplexMatrix apply_on_system(const SuperOp& prep, const ComplexMatrix& rho_se, int ds, int de) {
  if (prep.dim() != ds || rho_se.rows() != static_cast<Eigen::Index>(ds) * de) {
    throw Error(ErrorKind::DimensionMismatch, "preparation does not act on this system");
  }
  const ComplexMatrix a = prep.a_matrix();
  ComplexMatrix out = ComplexMatrix::Zero(rho_se.rows(), rho_se.cols());
  for (int r = 0; r < ds; ++r) {
    for (int s = 0; s < ds; ++s) {
      for (int rp = 0; rp < ds; ++rp) {
        for (int sp = 0; sp < ds; ++sp) {
          const Complex w = a(ds * r + s, ds * rp + sp);
          if (w == Complex(0.0)) continue;
          out.block(r * de, s * de, de, de) += w * rho_se.block(rp * de, sp * de, de, de);
        }
      }
    }
  }
  return out;
}

namespace {

// One step; returns the unnormalized state.
ComplexMatrix prepare_step(const PreparationMap& prep, const ComplexMatrix& rho, int ds, int de) {
  if (prep.kind() == PrepKind::Pin && prep.environment()) {
    if (prep.environment()->dim() != de) {
      throw Error(ErrorKind::DimensionMismatch, "pin environment has the wrong dimension");
    }
    return rho.trace() * kron(*prep.operand(), prep.environment()->matrix());
  }
  return apply_on_system(prep.superop(), rho, ds, de);
}

ComplexMatrix prepare(const PreparationMap& prep, const ComplexMatrix& rho, int ds, int de) {
  if (prep.kind() != PrepKind::Composite) return prepare_step(prep, rho, ds, de);
  ComplexMatrix cur = rho;
  for (const auto& step : prep.steps()) cur = prepare(step, cur, ds, de);
  return cur;
}

}  // namespace

PreparedState apply_preparation(const PreparationMap& prep, const BipartiteState& rho_se, const Tolerances& tol) {
  const int ds = rho_se.dim_system();
  const int de = rho_se.dim_environment();
  if (prep.dim() != ds) throw Error(ErrorKind::DimensionMismatch, "preparation dimension differs from dS");
  if (prep.kind() == PrepKind::Identity) {
    return {rho_se, 1.0, rho_se.reduced_system()};
  }
  ComplexMatrix raw = prepare(prep, rho_se.matrix(), ds, de);
  const double r = raw.trace().real();
  if (r <= tol.zero_probability) {
    throw Error(ErrorKind::ZeroProbability, "preparation " + prep.label() + " has zero probability");
  }
  raw /= r;
  raw = 0.5 * (raw + raw.adjoint());
  BipartiteState total(ds, de, raw, tol);
  DensityMatrix input = total.reduced_system();
  return {std::move(total), r, std::move(input)};
}

std::vector<PreparedState> stochastic_input_set(const DensityMatrix& pin_target,
                                                const std::vector<UnitaryOperator>& rotations,
                                                const BipartiteState& rho_se, const Tolerances& tol) {
  if (!pin_target.is_pure(tol.trace)) {
    throw Error(ErrorKind::InvalidArgument, "stochastic preparation needs a pure pin target");
  }
  const PreparationMap pin = PreparationMap::pin(pin_target);
  std::vector<PreparedState> out;
  if (rotations.empty()) {
    out.push_back(apply_preparation(pin, rho_se, tol));
    return out;
  }
  for (const auto& v : rotations) {
    out.push_back(apply_preparation(PreparationMap::composite({pin, PreparationMap::rotation(v)}), rho_se, tol));
  }
  return out;
}

std::vector<BlochVector> tomographic_bloch_set(double radius) {
  return {{-radius, 0, 0}, {radius, 0, 0}, {0, radius, 0}, {0, 0, radius}};
}

std::vector<DensityMatrix> tomographic_inputs(double radius) {
  std::vector<DensityMatrix> out;
  for (const auto& a : tomographic_bloch_set(radius)) out.push_back(bloch_to_density(a));
  return out;
}

std::vector<PreparedState> pseudo_pure_input_set(double p, const BipartiteState& rho_se, bool correlated,
                                                 const Tolerances& tol) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "pseudo-pure radius must lie in (0, 1]");
  if (rho_se.dim_system() != 2) throw Error(ErrorKind::InvalidDimension, "pseudo-pure inputs are qubit states");
  std::vector<PreparedState> out;
  const ComplexMatrix env = rho_se.reduced_environment().matrix();
  for (const auto& input : tomographic_inputs(p)) {
    ComplexMatrix total = correlated ? embed_system_state(rho_se, input.matrix()) : kron(input.matrix(), env);
    if (min_eigenvalue(total) < -tol.psd) {
      throw Error(ErrorKind::Incompatible, "pseudo-pure input is outside the compatibility domain");
    }
    BipartiteState state(2, rho_se.dim_environment(), total, tol);
    DensityMatrix reduced = state.reduced_system();
    out.push_back({std::move(state), 1.0, std::move(reduced)});
  }
  return out;
}

UnitaryOperator control_error_rotation(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "control error must lie in [0, 1)");
  }
  const double a = std::sqrt((1.0 + epsilon) / 2.0);
  const double b = std::sqrt((1.0 - epsilon) / 2.0);
  ComplexMatrix v(2, 2);
  v << a, b, -b, a;
  return UnitaryOperator(std::move(v));
}

UnitaryOperator rotation_to(const ComplexVector& psi) { return unitary_with_first_column(psi); }

UnitaryOperator rotation_to_bloch(const BlochVector& a) {
  if (std::abs(a.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "Bloch vector is not pure");
  return rotation_to(hermitian_eig(bloch_to_density(a).matrix()).eigenvectors.col(0));
}

}  // namespace qproc
