#include "qproc/mmap.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace qproc {

namespace {

bool has_environment_override(const PreparationMap& p) {
  if (p.environment()) return true;
  for (const auto& s : p.steps())
    if (has_environment_override(s)) return true;
  return false;
}

void require_qubit(int d, const char* what) {
  if (d != 2) throw Error(ErrorKind::InvalidDimension, std::string(what) + " is defined for a qubit system");
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

MMapTensor::MMapTensor(int dim, ComplexMatrix tensor) : dim_(dim), t_(std::move(tensor)) {
  if (dim < 1) throw Error(ErrorKind::InvalidDimension, "M-map dimension must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim * dim;
  if (t_.rows() != n || t_.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "M-map tensor must be d^3 x d^3");
  if (!all_finite(t_)) throw Error(ErrorKind::NonFinite, "M-map tensor has non-finite entries");
}

MMapTensor build_mmap(const UnitaryOperator& u, const BipartiteState& rho_se) {
  const int d = rho_se.dim_system();
  const int de = rho_se.dim_environment();
  if (u.dim() != d * de) throw Error(ErrorKind::DimensionMismatch, "unitary does not act on S (x) E");
  const ComplexMatrix& um = u.matrix();
  const ComplexMatrix& rho = rho_se.matrix();
  const int n = d * d * d;
  ComplexMatrix t = ComplexMatrix::Zero(n, n);
  // W((r e), (r'' s' b)) = sum_a U(r e, r' a) rho(r'' a, s'' b) rearranged per (r', r'').
  for (int r = 0; r < d; ++r)
    for (int rp = 0; rp < d; ++rp)
      for (int rpp = 0; rpp < d; ++rpp)
        for (int s = 0; s < d; ++s)
          for (int sp = 0; sp < d; ++sp)
            for (int spp = 0; spp < d; ++spp) {
              Complex acc = 0.0;
              for (int e = 0; e < de; ++e)
                for (int a = 0; a < de; ++a) {
                  const Complex ua = um(r * de + e, rp * de + a);
                  if (ua == Complex(0.0)) continue;
                  for (int b = 0; b < de; ++b)
                    acc += ua * rho(rpp * de + a, spp * de + b) * std::conj(um(s * de + e, sp * de + b));
                }
              t(MMapTensor::flat3(d, r, rp, rpp), MMapTensor::flat3(d, s, sp, spp)) = acc;
            }
  return MMapTensor(d, std::move(t));
}

ComplexMatrix contract(const MMapTensor& m, const SuperOp& prep) {
  const int d = m.dim();
  if (prep.dim() != d) throw Error(ErrorKind::DimensionMismatch, "preparation dimension differs from the M-map");
  const ComplexMatrix p = prep.b_matrix();
  const ComplexMatrix& t = m.matrix();
  ComplexMatrix q = ComplexMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      Complex acc = 0.0;
      for (int rp = 0; rp < d; ++rp)
        for (int rpp = 0; rpp < d; ++rpp)
          for (int sp = 0; sp < d; ++sp)
            for (int spp = 0; spp < d; ++spp)
              acc += t(MMapTensor::flat3(d, r, rp, rpp), MMapTensor::flat3(d, s, sp, spp)) *
                     p(rp * d + rpp, sp * d + spp);
      q(r, s) = acc;
    }
  return q;
}

ContractedOutput contract_with_preparation(const MMapTensor& m, const PreparationMap& prep,
                                           const Tolerances& tol) {
  if (has_environment_override(prep))
    throw Error(ErrorKind::InvalidArgument,
                "a pin with an explicit environment acts on E and cannot be contracted with the M-map");
  ComplexMatrix q = contract(m, prep.superop());
  const double r = q.trace().real();
  if (r <= tol.zero_probability)
    throw Error(ErrorKind::ZeroProbability, "preparation " + prep.label() + " has zero probability");
  q /= r;
  q = 0.5 * (q + q.adjoint()).eval();
  return {q, r};
}

DensityMatrix initial_state_from_mmap(const MMapTensor& m) {
  const int d = m.dim();
  const ComplexMatrix& t = m.matrix();
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (int rpp = 0; rpp < d; ++rpp)
    for (int spp = 0; spp < d; ++spp)
      for (int r = 0; r < d; ++r)
        for (int rp = 0; rp < d; ++rp)
          rho(rpp, spp) += t(MMapTensor::flat3(d, r, rp, rpp), MMapTensor::flat3(d, r, rp, spp));
  rho /= static_cast<double>(d);
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

SuperOp stochastic_map_from_mmap(const MMapTensor& m) {
  const int d = m.dim();
  const ComplexMatrix& t = m.matrix();
  ComplexMatrix b = ComplexMatrix::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r)
    for (int rp = 0; rp < d; ++rp)
      for (int s = 0; s < d; ++s)
        for (int sp = 0; sp < d; ++sp)
          for (int k = 0; k < d; ++k)
            b(r * d + rp, s * d + sp) += t(MMapTensor::flat3(d, r, rp, k), MMapTensor::flat3(d, s, sp, k));
  return SuperOp(d, MapForm::B, std::move(b));
}

ComplexMatrix uncorrelated_reference(const MMapTensor& m) {
  return kron(stochastic_map_from_mmap(m).b_matrix(), initial_state_from_mmap(m).matrix());
}

MemoryReport memory_matrix(const MMapTensor& m) {
  ComplexMatrix k = m.matrix() - uncorrelated_reference(m);
  MMapTensor km(m.dim(), k);
  ComplexMatrix chi = contract(km, SuperOp::identity(m.dim()));
  const double norm = max_abs(k);
  return {std::move(k), std::move(chi), norm};
}

ComplexMatrix mmap_element(const MMapTensor& m, const ComplexMatrix& a, const ComplexMatrix& b) {
  const int d = m.dim();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "operators must be d x d");
  ComplexMatrix p = kron(vec(a), vec(b).conjugate().transpose().eval());
  return contract(m, SuperOp(d, MapForm::B, std::move(p)));
}

// ---------------------------------------------------------------------------

ProjectiveOracle mmap_oracle(const MMapTensor& m) {
  require_qubit(m.dim(), "projective oracle");
  return [m](const BlochVector& a) -> OracleSample {
    ComplexMatrix p = bloch_to_density(a).matrix();
    ComplexMatrix q = contract(m, PreparationMap::projective(DensityMatrix(p)).superop());
    const double r = q.trace().real();
    if (r <= Tolerances{}.zero_probability) return {r, ComplexMatrix::Zero(2, 2)};
    q /= r;
    return {r, 0.5 * (q + q.adjoint())};
  };
}

ProjectiveOracle simulation_oracle(const UnitaryOperator& u, const BipartiteState& rho_se) {
  require_qubit(rho_se.dim_system(), "projective oracle");
  return [u, rho_se](const BlochVector& a) -> OracleSample {
    auto prep = PreparationMap::projective(bloch_to_density(a));
    try {
      auto prepared = apply_preparation(prep, rho_se);
      return {prepared.probability, evolve_reduced(u, prepared.total)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroProbability) throw;
      return {0.0, ComplexMatrix::Zero(2, 2)};
    }
  };
}

std::array<double, 9> mmap_design_row(const BlochVector& a) {
  return {a.a1 * a.a1, a.a2 * a.a2, a.a3 * a.a3, a.a1, a.a2, a.a3, a.a1 * a.a2, a.a1 * a.a3, a.a2 * a.a3};
}

ComplexMatrix PartialMMap::predict(const BlochVector& a) const {
  if (std::abs(a.norm() - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "partial M-map predicts pure projections only");
  const auto row = mmap_design_row(a);
  ComplexMatrix rq = ComplexMatrix::Zero(blocks[0].rows(), blocks[0].cols());
  for (std::size_t i = 0; i < 9; ++i) rq += row[i] * blocks[i];
  return rq / 4.0;
}

OracleSample PartialMMap::predict_sample(const BlochVector& a) const {
  ComplexMatrix rq = predict(a);
  const double r = rq.trace().real();
  if (r <= Tolerances{}.zero_probability) return {r, ComplexMatrix::Zero(rq.rows(), rq.cols())};
  return {r, rq / r};
}

std::vector<BlochVector> mmap_protocol_vectors(MMapProtocol protocol) {
  const double h = kInvSqrt2;
  std::vector<BlochVector> v{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1},
                             {0, 0, -1}, {h, h, 0},  {h, 0, h},  {0, h, h}};
  if (protocol == MMapProtocol::Twelve) {
    v.push_back({-h, -h, 0});
    v.push_back({-h, 0, -h});
    v.push_back({0, -h, -h});
  }
  return v;
}

std::vector<std::string> mmap_protocol_labels(MMapProtocol protocol) {
  std::vector<std::string> l{"1+", "1-", "2+", "2-", "3+", "3-", "4+", "5+", "6+"};
  if (protocol == MMapProtocol::Twelve) {
    l.push_back("4-");
    l.push_back("5-");
    l.push_back("6-");
  }
  return l;
}

namespace {

TomographyRecord oracle_record(const ProjectiveOracle& oracle, MMapProtocol protocol, Protocol tag) {
  const auto vs = mmap_protocol_vectors(protocol);
  const auto labels = mmap_protocol_labels(protocol);
  TomographyRecord rec;
  rec.protocol = tag;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto sample = oracle(vs[i]);
    if (sample.probability <= Tolerances{}.zero_probability)
      throw Error(ErrorKind::ZeroProbability, "projection " + labels[i] + " has zero probability");
    DensityMatrix p = bloch_to_density(vs[i]);
    rec.rows.push_back({labels[i], PreparationMap::projective(p), sample.probability, p.matrix(), sample.output});
  }
  return rec;
}

}  // namespace

TomographyRecord twelve_projection_record(const ProjectiveOracle& oracle, Protocol protocol) {
  return oracle_record(oracle, MMapProtocol::Twelve, protocol);
}

PartialMMap mmap_tomography(const ProjectiveOracle& oracle, MMapProtocol protocol) {
  return mmap_tomography(oracle_record(oracle, protocol, Protocol::Projective));
}

PartialMMap mmap_tomography(const TomographyRecord& record) {
  require_qubit(record.dim(), "M-map tomography");
  const auto n = static_cast<Eigen::Index>(record.rows.size());
  Eigen::MatrixXd g(n, 9);
  ComplexMatrix y(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = record.rows[static_cast<std::size_t>(i)];
    const BlochVector a = density_to_bloch(row.input);
    if (std::abs(a.norm() - 1.0) > 1e-6)
      throw Error(ErrorKind::InvalidArgument, "row " + row.label + " is not a pure projection");
    const auto c = mmap_design_row(a);
    for (int k = 0; k < 9; ++k) g(i, k) = c[static_cast<std::size_t>(k)];
    const ComplexMatrix rq = 4.0 * row.probability * row.output;
    for (int k = 0; k < 4; ++k) y(i, k) = rq(k / 2, k % 2);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
  qr.setThreshold(1e-10);
  if (qr.rank() < 9) {
    std::ostringstream os;
    os << "projections determine only " << qr.rank() << " of 9 blocks";
    throw Error(ErrorKind::ProtocolDegenerate, os.str());
  }
  const ComplexMatrix gc = g.cast<Complex>();
  Eigen::ColPivHouseholderQR<ComplexMatrix> cqr(gc);
  const ComplexMatrix x = cqr.solve(y);
  PartialMMap out;
  for (int k = 0; k < 9; ++k) {
    ComplexMatrix b(2, 2);
    for (int e = 0; e < 4; ++e) b(e / 2, e % 2) = x(k, e);
    out.blocks[static_cast<std::size_t>(k)] = b;
  }
  out.residual = max_abs(gc * x - y) / 4.0;
  return out;
}

std::array<ComplexMatrix, 9> mmap_blocks(const MMapTensor& m) {
  require_qubit(m.dim(), "M-map blocks");
  const ComplexMatrix id = identity(2);
  auto el = [&](const ComplexMatrix& a, const ComplexMatrix& b) { return mmap_element(m, a, b); };
  const ComplexMatrix ii = el(id, id);
  std::array<ComplexMatrix, 9> out;
  for (int j = 1; j <= 3; ++j) {
    const ComplexMatrix sj = pauli(j);
    out[static_cast<std::size_t>(j - 1)] = ii + el(sj, sj);
    out[static_cast<std::size_t>(j + 2)] = el(id, sj) + el(sj, id);
  }
  const int pairs[3][2] = {{1, 2}, {1, 3}, {2, 3}};
  for (int p = 0; p < 3; ++p) {
    const ComplexMatrix a = pauli(pairs[p][0]), b = pauli(pairs[p][1]);
    out[static_cast<std::size_t>(6 + p)] = el(a, b) + el(b, a);
  }
  return out;
}

const char* to_string(SumRuleVerdict v) {
  switch (v) {
    case SumRuleVerdict::Linear: return "Linear";
    case SumRuleVerdict::MMap: return "MMap";
    case SumRuleVerdict::Neither: return "Neither";
  }
  return "?";
}

SumRuleReport sum_rule_check(const TomographyRecord& record, double threshold) {
  require_qubit(record.dim(), "sum-rule check");
  const auto vs = mmap_protocol_vectors(MMapProtocol::Twelve);
  const auto labels = mmap_protocol_labels(MMapProtocol::Twelve);

  std::vector<BlochVector> inputs;
  for (const auto& row : record.rows) inputs.push_back(density_to_bloch(row.input));

  std::array<ComplexMatrix, 12> q;
  std::array<double, 12> r{};
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < 12; ++i) {
    bool found = false;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const double dist = std::sqrt(std::pow(inputs[k].a1 - vs[i].a1, 2) + std::pow(inputs[k].a2 - vs[i].a2, 2) +
                                    std::pow(inputs[k].a3 - vs[i].a3, 2));
      if (dist <= 1e-6) {
        q[i] = record.rows[k].output;
        r[i] = record.rows[k].probability;
        found = true;
        break;
      }
    }
    if (!found) missing.push_back(labels[i]);
  }
  if (!missing.empty()) {
    std::string msg = "record lacks projections";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorKind::MissingRows, msg);
  }

  // indices into the label order above
  enum { P1, M1, P2, M2, P3, M3, P4, P5, P6, M4, M5, M6 };
  auto res = [&](const char* name, const ComplexMatrix& diff) {
    const double v = max_abs(diff);
    return RuleResult{name, v, v <= threshold};
  };
  const double c = 0.5 - kInvSqrt2;
  const ComplexMatrix s1 = q[P1] + q[M1];

  SumRuleReport rep{};
  rep.linear = {
      res("Q1+ + Q1- = Q2+ + Q2-", s1 - q[P2] - q[M2]),
      res("Q1+ + Q1- = Q3+ + Q3-", s1 - q[P3] - q[M3]),
      res("Q4+ from Q1+, Q2+", q[P4] - c * s1 - kInvSqrt2 * (q[P1] + q[P2])),
      res("Q5+ from Q1+, Q3+", q[P5] - c * s1 - kInvSqrt2 * (q[P1] + q[P3])),
      res("Q6+ from Q2+, Q3+", q[P6] - c * s1 - kInvSqrt2 * (q[P2] + q[P3])),
      res("Q4+ + Q4- = Q1+ + Q1-", q[P4] + q[M4] - s1),
      res("Q5+ + Q5- = Q1+ + Q1-", q[P5] + q[M5] - s1),
      res("Q6+ + Q6- = Q1+ + Q1-", q[P6] + q[M6] - s1),
  };
  auto d = [&](int plus, int minus) -> ComplexMatrix { return r[plus] * q[plus] - r[minus] * q[minus]; };
  const double s2 = std::sqrt(2.0);
  rep.mmap = {
      res("r-weighted 4 from 1, 2", s2 * d(P4, M4) - d(P1, M1) - d(P2, M2)),
      res("r-weighted 5 from 1, 3", s2 * d(P5, M5) - d(P1, M1) - d(P3, M3)),
      res("r-weighted 6 from 2, 3", s2 * d(P6, M6) - d(P2, M2) - d(P3, M3)),
  };

  bool linear = true, mm = true;
  for (const auto& x : rep.linear) linear = linear && x.pass;
  for (const auto& x : rep.mmap) mm = mm && x.pass;
  rep.verdict = linear ? SumRuleVerdict::Linear : mm ? SumRuleVerdict::MMap : SumRuleVerdict::Neither;

  const std::pair<int, int> pairs[6] = {{P1, M1}, {P2, M2}, {P3, M3}, {P4, M4}, {P5, M5}, {P6, M6}};
  for (const auto& [p, m] : pairs) rep.completeness_residual = std::max(rep.completeness_residual, std::abs(r[p] + r[m] - 1.0));
  return rep;
}

}  // namespace qproc
