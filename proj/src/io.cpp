#include "qproc/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace qproc {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

BlochVector bloch_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) bad("a Bloch vector is an array of three numbers");
  return {number(j[0], "a1"), number(j[1], "a2"), number(j[2], "a3")};
}


Complex entry_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  bad("a matrix entry is a number or [re, im]");
}

ComplexMatrix entries_from_json(const Json& e, Eigen::Index rows, Eigen::Index cols) {
  if (!e.is_array() || static_cast<Eigen::Index>(e.size()) != rows * cols) {
    std::ostringstream os;
    os << "expected " << rows * cols << " matrix entries";
    bad(os.str());
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(e[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

Json entries_json(const ComplexMatrix& m) {
  Json e = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  return e;
}

Json matrices_json(const std::map<std::string, ComplexMatrix>& ms) {
  Json out = Json::object();
  for (const auto& [k, m] : ms) out[k] = matrix_to_json(m);
  return out;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries_json(m)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const int rows = integer(field(j, "rows"), "rows");
  const int cols = integer(field(j, "cols"), "cols");
  if (rows < 1 || cols < 1) bad("matrix dimensions must be positive");
  return entries_from_json(field(j, "entries"), rows, cols);
}

Json superop_to_json(const SuperOp& s) {
  return {{"dim", s.dim()}, {"form", to_string(s.form())}, {"entries", entries_json(s.matrix())}};
}

SuperOp superop_from_json(const Json& j) {
  const int d = integer(field(j, "dim"), "dim");
  if (d < 1) bad("dim must be positive");
  const Json& f = field(j, "form");
  if (!f.is_string() || (f != "A" && f != "B")) bad("form must be \"A\" or \"B\"");
  return SuperOp(d, f == "A" ? MapForm::A : MapForm::B, entries_from_json(field(j, "entries"), d * d, d * d));
}

Json mmap_to_json(const MMapTensor& m) { return {{"dim", m.dim()}, {"entries", entries_json(m.matrix())}}; }

MMapTensor mmap_from_json(const Json& j) {
  const int d = integer(field(j, "dim"), "dim");
  if (d < 1) bad("dim must be positive");
  return MMapTensor(d, entries_from_json(field(j, "entries"), d * d * d, d * d * d));
}

Json preparation_to_json(const PreparationMap& p) {
  Json params = Json::object();
  switch (p.kind()) {
    case PrepKind::Pin:
      params["target"] = matrix_to_json(*p.operand());
      if (p.environment()) params["environment"] = matrix_to_json(p.environment()->matrix());
      break;
    case PrepKind::Rotation: params["unitary"] = matrix_to_json(*p.operand()); break;
    case PrepKind::Projective: params["projector"] = matrix_to_json(*p.operand()); break;
    case PrepKind::Identity: params["dim"] = p.dim(); break;
    case PrepKind::Composite: {
      Json steps = Json::array();
      for (const auto& s : p.steps()) steps.push_back(preparation_to_json(s));
      params["steps"] = steps;
      break;
    }
  }
  return {{"kind", to_string(p.kind())}, {"params", params}};
}

PreparationMap preparation_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) bad("preparation kind must be a string");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const std::string k = kind.get<std::string>();
  auto state = [&](const char* matrix_key, const char* bloch_key) -> std::optional<DensityMatrix> {
    if (params.contains(matrix_key)) return DensityMatrix(matrix_from_json(params.at(matrix_key)));
    if (params.contains(bloch_key)) return bloch_to_density(bloch_from_json(params.at(bloch_key)));
    return std::nullopt;
  };
  if (k == "pin") {
    auto target = state("target", "bloch");
    if (!target) bad("pin needs a target or bloch parameter");
    return PreparationMap::pin(*target, state("environment", "environment_bloch"));
  }
  if (k == "rotation") {
    if (params.contains("unitary")) return PreparationMap::rotation(UnitaryOperator(matrix_from_json(params.at("unitary"))));
    if (params.contains("to_bloch")) return PreparationMap::rotation(rotation_to_bloch(bloch_from_json(params.at("to_bloch"))));
    if (params.contains("control_error"))
      return PreparationMap::rotation(control_error_rotation(number(params.at("control_error"), "control_error")));
    bad("rotation needs unitary, to_bloch or control_error");
  }
  if (k == "projective") {
    auto p = state("projector", "bloch");
    if (!p) bad("projective needs a projector or bloch parameter");
    return PreparationMap::projective(*p);
  }
  if (k == "identity") return PreparationMap::identity(integer(field(params, "dim"), "dim"));
  if (k == "composite") {
    const Json& steps = field(params, "steps");
    if (!steps.is_array() || steps.empty()) bad("composite needs a non-empty steps array");
    std::vector<PreparationMap> out;
    for (const auto& s : steps) out.push_back(preparation_from_json(s));
    return PreparationMap::composite(std::move(out));
  }
  bad("unknown preparation kind '" + k + "'");
}

Json record_to_json(const TomographyRecord& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json o = {{"label", row.label},
              {"probability", row.probability},
              {"input", matrix_to_json(row.input)},
              {"output", matrix_to_json(row.output)}};
    if (row.prep) o["prep"] = preparation_to_json(*row.prep);
    rows.push_back(o);
  }
  return {{"protocol", to_string(r.protocol)}, {"rows", rows}};
}

TomographyRecord record_from_json(const Json& j) {
  TomographyRecord r;
  if (j.contains("protocol")) {
    if (!j.at("protocol").is_string()) bad("protocol must be a string");
    r.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  }
  const Json& rows = field(j, "rows");
  if (!rows.is_array()) bad("rows must be an array");
  for (const auto& o : rows) {
    TomographyRow row;
    if (o.contains("label")) {
      if (!o.at("label").is_string()) bad("label must be a string");
      row.label = o.at("label").get<std::string>();
    }
    if (o.contains("probability")) row.probability = number(o.at("probability"), "probability");
    row.input = matrix_from_json(field(o, "input"));
    row.output = matrix_from_json(field(o, "output"));
    if (row.input.rows() != row.input.cols() || row.output.rows() != row.input.rows() ||
        row.output.cols() != row.input.cols())
      throw Error(ErrorKind::DimensionMismatch, "row " + row.label + ": input and output must be square and alike");
    if (!r.rows.empty() && row.input.rows() != r.rows.front().input.rows())
      throw Error(ErrorKind::DimensionMismatch, "rows have different dimensions");
    if (o.contains("prep")) row.prep = preparation_from_json(o.at("prep"));
    r.rows.push_back(std::move(row));
  }
  return r;
}

Json partial_mmap_to_json(const PartialMMap& p) {
  Json blocks = Json::object();
  for (std::size_t k = 0; k < 9; ++k) blocks[kMMapBlockNames[k]] = matrix_to_json(p.blocks[k]);
  return {{"blocks", blocks}, {"residual", p.residual}};
}

PartialMMap partial_mmap_from_json(const Json& j) {
  PartialMMap p;
  const Json& blocks = field(j, "blocks");
  for (std::size_t k = 0; k < 9; ++k) {
    p.blocks[k] = matrix_from_json(field(blocks, kMMapBlockNames[k]));
    if (p.blocks[k].rows() != 2 || p.blocks[k].cols() != 2) bad("M-map blocks are 2 x 2");
  }
  if (j.contains("residual")) p.residual = number(j.at("residual"), "residual");
  return p;
}

Json positivity_to_json(const PositivityClass& p) {
  Json o = {{"tag", to_string(p.tag)}, {"min_eigenvalue", p.min_eigenvalue}, {"samples_checked", p.samples_checked}};
  if (p.min_output_eigenvalue) o["min_output_eigenvalue"] = *p.min_output_eigenvalue;
  if (p.witness) o["witness"] = matrix_to_json(*p.witness);
  return o;
}

Json sum_rules_to_json(const SumRuleReport& r) {
  auto rules = [](const auto& rs) {
    Json a = Json::array();
    for (const auto& x : rs) a.push_back({{"name", x.name}, {"residual", x.residual}, {"pass", x.pass}});
    return a;
  };
  return {{"linear", rules(r.linear)},
          {"mmap", rules(r.mmap)},
          {"verdict", to_string(r.verdict)},
          {"completeness_residual", r.completeness_residual}};
}

Json scenario_to_json(const ScenarioResult& r) {
  Json curves = Json::array();
  for (const auto& c : r.curves) curves.push_back({{"x", c.x}, {"values", c.values}});
  return {{"name", r.name},         {"params", r.params},     {"columns", r.columns}, {"curves", curves},
          {"matrices", matrices_json(r.matrices)}, {"verdicts", r.verdicts}, {"summary", r.summary}};
}

std::string scenario_to_csv(const ScenarioResult& r) {
  std::string out = "two_omega_t";
  for (const auto& c : r.columns) out += "," + c;
  out += "\n";
  char buf[32];
  for (const auto& c : r.curves) {
    std::snprintf(buf, sizeof buf, "%.12g", c.x);
    out += buf;
    for (double v : c.values) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

SimulationConfig simulation_config_from_json(const Json& j, const Tolerances& tol) {
  const Json& uj = field(j, "U");
  std::optional<UnitaryOperator> u;
  if (uj.contains("matrix")) {
    u = UnitaryOperator(matrix_from_json(uj.at("matrix")), tol);
  } else {
    const Json& kind = field(uj, "kind");
    if (kind != "heisenberg_swap") bad("U.kind must be \"heisenberg_swap\" or U must give a matrix");
    u = heisenberg_unitary(number(field(uj, "omega_t"), "omega_t"));
  }

  const Json& rj = field(j, "rhoSE");
  std::optional<BipartiteState> rho;
  if (rj.contains("family")) {
    const Json& f = rj.at("family");
    TwoQubitParams p;
    if (f.contains("a")) p.a = bloch_from_json(f.at("a"));
    if (f.contains("b")) p.b = bloch_from_json(f.at("b"));
    if (f.contains("c")) {
      const Json& c = f.at("c");
      if (!c.is_array() || c.size() != 3) bad("family.c is a 3 x 3 array");
      for (std::size_t a = 0; a < 3; ++a) {
        if (!c[a].is_array() || c[a].size() != 3) bad("family.c is a 3 x 3 array");
        for (std::size_t b = 0; b < 3; ++b) p.c[a][b] = number(c[a][b], "family.c entry");
      }
    }
    if (f.contains("c23")) p.c[1][2] = number(f.at("c23"), "c23");
    rho = BipartiteState(p, tol);
  } else {
    rho = BipartiteState(integer(field(rj, "dim_system"), "dim_system"),
                         integer(field(rj, "dim_environment"), "dim_environment"),
                         matrix_from_json(field(rj, "matrix")), tol);
  }
  if (u->dim() != rho->dim_system() * rho->dim_environment())
    throw Error(ErrorKind::DimensionMismatch, "U does not act on the system-environment space");

  SimulationConfig cfg{*u, *rho, {}, Protocol::Stochastic, std::nullopt, 0};
  const Json& preps = field(j, "preps");
  if (!preps.is_array() || preps.empty()) bad("preps must be a non-empty array");
  for (const auto& p : preps) {
    cfg.preparations.push_back(preparation_from_json(p));
    if (cfg.preparations.back().dim() != rho->dim_system())
      throw Error(ErrorKind::DimensionMismatch, "preparation dimension differs from the system");
  }
  if (j.contains("protocol")) {
    if (!j.at("protocol").is_string()) bad("protocol must be a string");
    cfg.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  }
  if (j.contains("shots")) {
    if (!j.at("shots").is_number_integer() || j.at("shots").get<long>() < 1) bad("shots must be a positive integer");
    cfg.shots = j.at("shots").get<long>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0) bad("seed must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

TomographyRecord simulate(const SimulationConfig& config, const Tolerances& tol) {
  TomographyRecord rec = simulate_process(config.unitary, config.state, config.preparations, config.protocol, tol);
  if (config.shots) {
    for (std::size_t i = 0; i < rec.rows.size(); ++i)
      rec.rows[i].output = state_tomography(rec.rows[i].output, config.shots, config.seed + i).matrix;
  }
  return rec;
}

std::vector<BlochVector> PolarizationTable::implied_bloch_vectors() const {
  std::vector<BlochVector> out(states.size());
  for (std::size_t p = 0; p < projectors.size(); ++p) {
    const std::string& name = projectors[p];
    if (name.size() != 3 || name[0] != 'P' || name[1] < '1' || name[1] > '3' || (name[2] != '+' && name[2] != '-'))
      bad("projector names have the form P1+, P3-, ...");
    const int j = name[1] - '1';
    const double sign = name[2] == '+' ? 1.0 : -1.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      const double a = sign * (2 * probabilities[p][s] - 1);
      double* slot = j == 0 ? &out[s].a1 : j == 1 ? &out[s].a2 : &out[s].a3;
      *slot = a;
    }
  }
  return out;
}

Json polarization_to_json(const PolarizationTable& t) {
  return {{"source", t.source}, {"projectors", t.projectors}, {"states", t.states}, {"probabilities", t.probabilities}};
}

PolarizationTable polarization_from_json(const Json& j) {
  PolarizationTable t;
  try {
    if (j.contains("source")) t.source = j.at("source").get<std::string>();
    t.projectors = field(j, "projectors").get<std::vector<std::string>>();
    t.states = field(j, "states").get<std::vector<std::string>>();
    t.probabilities = field(j, "probabilities").get<std::vector<std::vector<double>>>();
  } catch (const Json::exception& e) {
    bad(std::string("malformed polarization table: ") + e.what());
  }
  if (t.probabilities.size() != t.projectors.size()) bad("one probability row per projector");
  for (const auto& row : t.probabilities) {
    if (row.size() != t.states.size()) bad("one probability per state in every row");
    for (double p : row)
      if (!(p >= 0.0 && p <= 1.0)) bad("probabilities lie in [0, 1]");
  }
  return t;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) bad("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) bad("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    bad("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace qproc
