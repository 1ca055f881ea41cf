#include "qproc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace qproc {

namespace {

const double kPi = std::numbers::pi;

struct Entry {
  const char* name;
  ScenarioParams defaults;
  std::function<void(ScenarioResult&)> run;
};

double param(const ScenarioResult& r, const std::string& key) { return r.params.at(key); }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

std::vector<double> grid_of(const ScenarioResult& r) {
  const double n = param(r, "points");
  require(n >= 2 && n <= 1e6 && n == std::floor(n), "points must be an integer in [2, 1e6]");
  return scenario_grid(static_cast<int>(n));
}

BipartiteState family_of(const ScenarioResult& r) {
  const double c23 = param(r, "c23");
  require(std::abs(c23) <= 1.0, "c23 must lie in [-1, 1]");
  const BlochVector a{param(r, "a1"), param(r, "a2"), param(r, "a3")};
  require(a.norm() <= 1.0 + 1e-12, "|a| must not exceed 1");
  const auto p = TwoQubitParams::correlated_c23({}, c23);
  BipartiteState base(p);
  if (!compatibility_check(base, a))
    throw Error(ErrorKind::Incompatible, "system Bloch vector is incompatible with c23");
  return BipartiteState(TwoQubitParams::correlated_c23(a, c23));
}

std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

std::vector<double> spectrum(const ComplexMatrix& m) {
  const auto eig = hermitian_eig(hermitian_part(m));
  return {eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size()};
}

// Eigenvalue curves of a map built per grid point.
void eigen_curves(ScenarioResult& r, const std::function<SuperOp(double)>& build) {
  r.columns = numbered("lambda_", 4);
  double lo = 0.0;
  for (double x : grid_of(r)) {
    const SuperOp map = build(x).to(MapForm::B);
    auto ev = spectrum(map.matrix());
    lo = std::min(lo, *std::min_element(ev.begin(), ev.end()));
    r.curves.push_back({x, std::move(ev)});
  }
  r.matrices["map_at_half_pi"] = build(kPi / 2).to(MapForm::B).matrix();
  r.summary["min_eigenvalue"] = lo;
  r.verdicts["negative"] = lo < -1e-10 ? "yes" : "no";
}

double verdict_code(SumRuleVerdict v) { return static_cast<double>(static_cast<int>(v)); }

std::string aggregate(const std::vector<SumRuleVerdict>& vs) {
  bool any_mmap = false;
  for (auto v : vs) {
    if (v == SumRuleVerdict::Neither) return to_string(SumRuleVerdict::Neither);
    any_mmap = any_mmap || v == SumRuleVerdict::MMap;
  }
  return to_string(any_mmap ? SumRuleVerdict::MMap : SumRuleVerdict::Linear);
}

double max_rule(const auto& rules) {
  double m = 0.0;
  for (const auto& x : rules) m = std::max(m, x.residual);
  return m;
}

UnitaryOperator coupling(double x) { return heisenberg_unitary(x / 2); }

void run_fig2_1(ScenarioResult& r) {
  const auto rho = family_of(r);
  eigen_curves(r, [&](double x) { return dynamical_map(coupling(x), rho); });
}

void run_fig5_1(ScenarioResult& r) {
  const auto rho = family_of(r);
  const auto preps = stochastic_preparations(tomographic_bloch_set());
  eigen_curves(r, [&](double x) { return reconstruct_linear_map(simulate_process(coupling(x), rho, preps)); });
}

void run_fig5_2(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double env = param(r, "env_a3");
  require(std::abs(env) <= 1.0, "env_a3 must lie in [-1, 1]");
  const auto preps = multiple_pin_preparations(env);
  eigen_curves(r, [&](double x) { return reconstruct_linear_map(simulate_process(coupling(x), rho, preps)); });
}

void run_fig5_3(ScenarioResult& r) {
  const auto rho = family_of(r);
  std::vector<PreparationMap> preps;
  for (const auto& p : tomographic_inputs()) preps.push_back(PreparationMap::projective(p));
  r.summary["c23_effective"] = param(r, "c23") / (1 + param(r, "a2"));
  eigen_curves(r, [&](double x) {
    return reconstruct_linear_map(simulate_process(coupling(x), rho, preps, Protocol::Projective));
  });
}

void run_control_error(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double eps = param(r, "epsilon");
  require(eps >= 0.0 && eps < 1.0, "epsilon must lie in [0, 1)");
  const auto preps = control_error_preparations(eps);
  std::vector<ComplexMatrix> ideal;
  for (const auto& p : tomographic_inputs()) ideal.push_back(p.matrix());
  const auto duals = dual_set(ideal);
  auto build = [&](double x) {
    const auto rec = simulate_process(coupling(x), rho, preps);
    std::vector<ComplexMatrix> outs;
    for (const auto& row : rec.rows) outs.push_back(row.output);
    return reconstruct_with_duals(outs, duals);
  };
  eigen_curves(r, build);
  double lo = 0.0;
  for (const auto& c : r.curves)
    if (c.x > 0 && c.x < kPi / 2) lo = std::min(lo, *std::min_element(c.values.begin(), c.values.end()));
  r.summary["min_eigenvalue_first_quarter"] = lo;
}

void run_pseudo_pure(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double p = param(r, "p");
  const double corr = param(r, "correlated");
  require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  require(corr == 0.0 || corr == 1.0, "correlated must be 0 or 1");
  const bool correlated = corr == 1.0;
  const auto prepared = pseudo_pure_input_set(p, rho, correlated);
  std::vector<ComplexMatrix> ideal;
  for (const auto& q : tomographic_inputs()) ideal.push_back(q.matrix());
  const auto naive = dual_set(ideal);

  r.columns = {"error_matched_duals", "error_pure_duals"};
  double worst = 0.0, witness = 0.0;
  for (double x : grid_of(r)) {
    const auto u = coupling(x);
    const auto rec = simulate_prepared(u, prepared, Protocol::PseudoPure);
    const SuperOp target = correlated ? dynamical_map(u, rho).to(MapForm::B)
                                      : map_from_contraction(u, rho.reduced_environment());
    std::vector<ComplexMatrix> outs;
    for (const auto& row : rec.rows) outs.push_back(row.output);
    const double e1 = max_abs(reconstruct_linear_map(rec).b_matrix() - target.b_matrix());
    const double e2 = max_abs(reconstruct_with_duals(outs, naive).b_matrix() - target.b_matrix());
    worst = std::max(worst, e1);
    witness = std::max(witness, e2);
    r.curves.push_back({x, {e1, e2}});
  }
  r.summary["max_error_matched_duals"] = worst;
  r.summary["max_error_pure_duals"] = witness;
  r.verdicts["recovered"] = worst <= 1e-10 ? "yes" : "no";
  r.verdicts["pure_dual_error_at_least_half_deficit"] = witness >= (1 - p) / 2 - 1e-12 ? "yes" : "no";
}

void run_swap_nonlinearity(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double env = param(r, "env_a3");
  require(std::abs(env) <= 1.0, "env_a3 must lie in [-1, 1]");
  const auto four = multiple_pin_preparations(env);
  const auto twelve = two_pin_twelve_preparations(env);
  r.columns = {"q_minus_lambda_1", "q_minus_lambda_2", "max_linear_residual", "max_mmap_residual", "verdict_code"};
  std::vector<SumRuleVerdict> verdicts;
  double lo = 0.0;
  for (double x : grid_of(r)) {
    const auto u = coupling(x);
    const auto rec = simulate_process(u, rho, four);
    const ComplexMatrix q_minus = 2.0 * rec.rows[0].output - rec.rows[1].output;
    auto ev = spectrum(q_minus);
    lo = std::min(lo, ev.back());
    const auto rep = sum_rule_check(simulate_process(u, rho, twelve));
    verdicts.push_back(rep.verdict);
    r.curves.push_back({x, {ev[0], ev[1], max_rule(rep.linear), max_rule(rep.mmap), verdict_code(rep.verdict)}});
  }
  const auto at = simulate_process(coupling(kPi / 2), rho, four);
  r.matrices["q_minus_at_half_pi"] = 2.0 * at.rows[0].output - at.rows[1].output;
  r.summary["min_q_minus_eigenvalue"] = lo;
  r.verdicts["sum_rules"] = aggregate(verdicts);
  r.verdicts["q_minus_physical"] = lo < -1e-10 ? "no" : "yes";
}

void run_memory_extraction(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double c23 = param(r, "c23");
  r.columns = {"chi_sigma_1", "chi_sigma_2", "chi_sigma_3", "memory_norm"};
  double dev = 0.0;
  for (double x : grid_of(r)) {
    const auto rep = memory_matrix(build_mmap(coupling(x), rho));
    std::vector<double> v;
    for (int j = 1; j <= 3; ++j) v.push_back(0.5 * (rep.chi_s_t * pauli(j)).trace().real());
    v.push_back(rep.norm);
    dev = std::max(dev, max_abs(rep.chi_s_t + 0.5 * c23 * std::cos(x) * std::sin(x) * pauli(1)));
    r.curves.push_back({x, std::move(v)});
  }
  r.matrices["memory_at_quarter_pi"] = memory_matrix(build_mmap(coupling(kPi / 4), rho)).k;
  r.summary["max_closed_form_deviation"] = dev;
}

void run_mmap_roundtrip(ScenarioResult& r) {
  const auto rho = family_of(r);
  const double probes = param(r, "probes");
  const double seed = param(r, "seed");
  require(probes >= 1 && probes <= 1e5 && probes == std::floor(probes), "probes must be a positive integer");
  require(seed >= 0 && seed == std::floor(seed), "seed must be a non-negative integer");
  std::vector<BlochVector> probe_set;
  for (int k = 0; k < static_cast<int>(probes); ++k)
    probe_set.push_back(density_to_bloch(
        DensityMatrix::pure(random_pure_state(2, static_cast<std::uint64_t>(seed) + static_cast<std::uint64_t>(k)))
            .matrix()));

  r.columns = {"fit_residual", "max_prediction_error", "verdict_code"};
  std::vector<SumRuleVerdict> verdicts;
  double worst = 0.0;
  for (double x : grid_of(r)) {
    const auto u = coupling(x);
    const auto m = build_mmap(u, rho);
    const auto oracle = simulation_oracle(u, rho);
    const auto fit = mmap_tomography(oracle, MMapProtocol::Nine);
    double err = 0.0;
    for (const auto& a : probe_set) {
      const ComplexMatrix direct = contract(m, PreparationMap::projective(bloch_to_density(a)).superop());
      err = std::max(err, max_abs(fit.predict(a) - direct));
    }
    worst = std::max(worst, err);
    const auto rep = sum_rule_check(twelve_projection_record(oracle));
    verdicts.push_back(rep.verdict);
    r.curves.push_back({x, {fit.residual, err, verdict_code(rep.verdict)}});
  }
  r.summary["max_prediction_error"] = worst;
  r.verdicts["sum_rules"] = aggregate(verdicts);
}

const std::vector<Entry>& catalog() {
  static const ScenarioParams family{{"c23", 0.5}, {"a1", 0.0}, {"a2", 0.0}, {"a3", 0.0}, {"points", 400}};
  auto with = [](ScenarioParams base, const ScenarioParams& extra) {
    for (const auto& [k, v] : extra) base[k] = v;
    return base;
  };
  static const std::vector<Entry> entries{
      {"fig2_1", family, run_fig2_1},
      {"fig5_1", family, run_fig5_1},
      {"fig5_2", with(family, {{"env_a3", 1.0}}), run_fig5_2},
      {"fig5_3", family, run_fig5_3},
      {"control_error", with(family, {{"epsilon", 0.1}}), run_control_error},
      {"pseudo_pure", with(family, {{"p", 0.5}, {"correlated", 0.0}}), run_pseudo_pure},
      {"swap_nonlinearity", with(family, {{"env_a3", 1.0}}), run_swap_nonlinearity},
      {"memory_extraction", family, run_memory_extraction},
      {"mmap_tomography_roundtrip", with(family, {{"probes", 50}, {"seed", 0}}), run_mmap_roundtrip},
  };
  return entries;
}

const Entry& find(const std::string& name) {
  for (const auto& e : catalog())
    if (name == e.name) return e;
  std::string msg = "unknown scenario '" + name + "'; available:";
  for (const auto& e : catalog()) msg += std::string(" ") + e.name;
  throw Error(ErrorKind::UnknownScenario, msg);
}

}  // namespace

std::vector<std::string> scenario_catalog() {
  std::vector<std::string> out;
  for (const auto& e : catalog()) out.emplace_back(e.name);
  return out;
}

ScenarioParams scenario_defaults(const std::string& name) { return find(name).defaults; }

ScenarioResult run_scenario(const std::string& name, const ScenarioParams& overrides) {
  const Entry& e = find(name);
  ScenarioResult r;
  r.name = e.name;
  r.params = e.defaults;
  for (const auto& [k, v] : overrides) {
    if (!r.params.count(k)) {
      std::string msg = "scenario " + name + " has no parameter '" + k + "'; known:";
      for (const auto& kv : e.defaults) msg += " " + kv.first;
      throw Error(ErrorKind::InvalidArgument, msg);
    }
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "parameter " + k + " is not finite");
    r.params[k] = v;
  }
  e.run(r);
  for (const auto& [k, m] : r.matrices)
    if (!all_finite(m)) throw Error(ErrorKind::NonFinite, "scenario produced a non-finite matrix " + k);
  return r;
}

std::vector<double> scenario_grid(int points) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "a grid needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = 2 * kPi * i / (points - 1);
  return xs;
}

std::vector<PreparationMap> stochastic_preparations(const std::vector<BlochVector>& targets) {
  const auto pin = PreparationMap::pin(DensityMatrix::basis_state(2, 0));
  std::vector<PreparationMap> out;
  for (const auto& a : targets) out.push_back(PreparationMap::composite({pin, PreparationMap::rotation(rotation_to_bloch(a))}));
  return out;
}

std::vector<PreparationMap> multiple_pin_preparations(double env_a3) {
  std::vector<PreparationMap> out{
      PreparationMap::pin(DensityMatrix::maximally_mixed(2), bloch_to_density({0, 0, env_a3}))};
  for (auto& p : stochastic_preparations({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) out.push_back(std::move(p));
  return out;
}

std::vector<PreparationMap> control_error_preparations(double epsilon) {
  const auto pin = PreparationMap::pin(DensityMatrix::basis_state(2, 0));
  std::vector<PreparationMap> out{PreparationMap::composite({pin, PreparationMap::rotation(control_error_rotation(epsilon))})};
  for (auto& p : stochastic_preparations({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) out.push_back(std::move(p));
  return out;
}

std::vector<PreparationMap> two_pin_twelve_preparations(double env_a3) {
  const auto first = PreparationMap::pin(DensityMatrix::basis_state(2, 0));
  const auto second = PreparationMap::pin(DensityMatrix::basis_state(2, 0), bloch_to_density({0, 0, env_a3}));
  const auto labels = mmap_protocol_labels(MMapProtocol::Twelve);
  const auto vs = mmap_protocol_vectors(MMapProtocol::Twelve);
  std::vector<PreparationMap> out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const bool minus = labels[i].back() == '-';
    out.push_back(PreparationMap::composite({minus ? second : first, PreparationMap::rotation(rotation_to_bloch(vs[i]))}));
  }
  return out;
}

}  // namespace qproc
