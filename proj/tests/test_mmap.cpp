#include "doctest.h"
#include "oracles.hpp"
#include "qproc/mmap.hpp"

#include <cmath>
#include <numbers>

using namespace qproc;
using oracle::maxdiff;

namespace {

const double kPi = std::numbers::pi;

BipartiteState family(BlochVector a, double c23) {
  return BipartiteState(TwoQubitParams::correlated_c23(a, c23));
}

// Brute-force Tr_E[U R U^dagger] with R = (P (x) I) rho_SE via the Kraus-free
// definition, independent of the library's preparation code.
ComplexMatrix direct_output(const ComplexMatrix& u, const ComplexMatrix& rho, const ComplexMatrix& p_b, int d, int de) {
  ComplexMatrix prepared = ComplexMatrix::Zero(d * de, d * de);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int e = 0; e < de; ++e)
        for (int f = 0; f < de; ++f)
          for (int rp = 0; rp < d; ++rp)
            for (int sp = 0; sp < d; ++sp)
              prepared(r * de + e, s * de + f) += p_b(r * d + rp, s * d + sp) * rho(rp * de + e, sp * de + f);
  ComplexMatrix full = u * prepared * u.adjoint();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int e = 0; e < de; ++e) out(r, s) += full(r * de + e, s * de + e);
  return out;
}

std::vector<PreparationMap> assorted_preps(int d, std::uint64_t seed) {
  auto pure = DensityMatrix::pure(random_pure_state(d, seed));
  auto rot = PreparationMap::rotation(random_unitary(d, seed + 7));
  return {PreparationMap::identity(d), PreparationMap::pin(pure), rot, PreparationMap::projective(pure),
          PreparationMap::composite({PreparationMap::pin(pure), rot}),
          PreparationMap::composite({PreparationMap::projective(pure), rot})};
}

}  // namespace

TEST_CASE("M-map contraction agrees with direct evolution") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const int de = 2 + static_cast<int>(seed % 2);
    BipartiteState rho(2, de, random_density(2 * de, seed).matrix());
    auto u = random_unitary(2 * de, seed + 100);
    auto m = build_mmap(u, rho);
    CHECK(m.trace() == doctest::Approx(2.0).epsilon(1e-12));
    for (const auto& prep : assorted_preps(2, seed)) {
      ComplexMatrix want = direct_output(u.matrix(), rho.matrix(), prep.superop().b_matrix(), 2, de);
      CHECK(max_abs(contract(m, prep.superop()) - want) < 1e-12);
      auto out = contract_with_preparation(m, prep);
      CHECK(out.probability == doctest::Approx(want.trace().real()).epsilon(1e-12));
      CHECK(max_abs(out.state - want / want.trace().real()) < 1e-12);
    }
  }
}

TEST_CASE("M-map on a qutrit") {
  BipartiteState rho(3, 2, random_density(6, 3).matrix());
  auto u = random_unitary(6, 4);
  auto m = build_mmap(u, rho);
  CHECK(m.matrix().rows() == 27);
  for (const auto& prep : assorted_preps(3, 11)) {
    ComplexMatrix want = direct_output(u.matrix(), rho.matrix(), prep.superop().b_matrix(), 3, 2);
    CHECK(max_abs(contract(m, prep.superop()) - want) < 1e-12);
  }
  CHECK(max_abs(initial_state_from_mmap(m).matrix() - rho.reduced_system().matrix()) < 1e-12);
}

TEST_CASE("stochastic map and initial state from the M-map") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BipartiteState rho(2, 2, random_density(4, seed + 20).matrix());
    auto u = random_unitary(4, seed + 30);
    auto m = build_mmap(u, rho);
    CHECK(max_abs(initial_state_from_mmap(m).matrix() - rho.reduced_system().matrix()) < 1e-12);
    auto lam = stochastic_map_from_mmap(m);
    CHECK(max_abs(lam.b_matrix() - map_from_contraction(u, rho.reduced_environment()).b_matrix()) < 1e-12);
  }
  // the stochastic map of the Heisenberg process
  for (double x : oracle::grid(9)) {
    auto m = build_mmap(heisenberg_unitary(x / 2), family({0.1, 0.2, 0.3}, 0.5));
    CHECK(maxdiff(stochastic_map_from_mmap(m).b_matrix(), ComplexMatrix(oracle::lambda_s(x))) < 1e-12);
  }
}

TEST_CASE("memory matrix") {
  auto u = random_unitary(4, 8);
  auto product = build_mmap(u, BipartiteState::product(random_density(2, 1).matrix(), random_density(2, 2).matrix()));
  auto none = memory_matrix(product);
  CHECK(none.norm < 1e-12);
  CHECK(max_abs(none.chi_s_t) < 1e-12);

  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    BipartiteState rho(2, 2, random_density(4, seed + 40).matrix());
    auto uu = random_unitary(4, seed + 50);
    auto rep = memory_matrix(build_mmap(uu, rho));
    ComplexMatrix chi = rho.correlation_matrix();
    ComplexMatrix want = partial_trace(uu.matrix() * chi * uu.matrix().adjoint(), 2, 2, Party::Environment);
    CHECK(max_abs(rep.chi_s_t - want) < 1e-12);
    CHECK(rep.norm > 1e-6);
    CHECK(rep.norm == doctest::Approx(max_abs(rep.k)));
  }

  // correlated family under the Heisenberg coupling: only c23 feeds chi_S
  const double x = kPi / 3, c23 = 0.5;
  auto rep = memory_matrix(build_mmap(heisenberg_unitary(x / 2), family({}, c23)));
  oracle::M4 chi = 0.25 * c23 * oracle::kron2(oracle::s2(), oracle::s3());
  oracle::M4 h = oracle::heisenberg(x / 2);
  oracle::M4 evolved = h * chi * h.adjoint();
  oracle::M2 want = oracle::M2::Zero();
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) want(r, s) = evolved(2 * r, 2 * s) + evolved(2 * r + 1, 2 * s + 1);
  CHECK(maxdiff(rep.chi_s_t, ComplexMatrix(want)) < 1e-12);
  CHECK(maxdiff(rep.chi_s_t, ComplexMatrix(-0.5 * c23 * std::cos(x) * std::sin(x) * oracle::s1())) < 1e-12);
  CHECK(std::abs(rep.chi_s_t.trace()) < 1e-12);
}

TEST_CASE("M-map structure") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto m = build_mmap(random_unitary(4, seed + 300), BipartiteState(2, 2, random_density(4, seed + 400).matrix()));
    CHECK(hermiticity_residual(m.matrix()) <= 1e-12);
    CHECK(m.trace() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(min_eigenvalue(m.matrix()) >= -1e-10);
  }
  // identity coupling returns the initial system state
  auto rho = random_density(2, 3);
  auto m = build_mmap(UnitaryOperator::identity(4), BipartiteState::product(rho.matrix(), random_density(2, 4).matrix()));
  CHECK(max_abs(contract_with_preparation(m, PreparationMap::identity(2)).state - rho.matrix()) < 1e-12);
  CHECK(max_abs(stochastic_map_from_mmap(m).b_matrix() - SuperOp::identity(2).matrix()) < 1e-12);
}

TEST_CASE("environment-pinning preparations are not M-map contractions") {
  auto m = build_mmap(heisenberg_unitary(0.3), family({}, 0.5));
  auto zero = DensityMatrix::basis_state(2, 0);
  auto env = DensityMatrix::maximally_mixed(2);
  auto check = [&](const PreparationMap& p) {
    try {
      contract_with_preparation(m, p);
      FAIL("expected rejection");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
  };
  check(PreparationMap::pin(zero, env));
  check(PreparationMap::composite({PreparationMap::pin(zero, env), PreparationMap::rotation(random_unitary(2, 1))}));
  CHECK_NOTHROW(contract_with_preparation(m, PreparationMap::pin(zero)));
}

TEST_CASE("projective preparations through the M-map") {
  const double c23 = 0.5;
  for (double a2 : {0.0, 0.3}) {
    const double cp = c23 / (1 + a2);
    for (double x : {0.0, kPi / 5, kPi / 2}) {
      const double c = std::cos(x), s = std::sin(x);
      auto m = build_mmap(heisenberg_unitary(x / 2), family({0, a2, 0}, c23));
      auto out = contract_with_preparation(m, PreparationMap::projective(bloch_to_density({0, 1, 0})));
      oracle::M2 want = 0.5 * (oracle::id2() - cp * c * s * oracle::s1() + c * c * oracle::s2() + cp * s * s * oracle::s3());
      CHECK(maxdiff(out.state, ComplexMatrix(want)) < 1e-12);
      CHECK(out.probability == doctest::Approx((1 + a2) / 2).epsilon(1e-12));
    }
  }
}

TEST_CASE("M-map elements") {
  auto m = build_mmap(random_unitary(4, 5), BipartiteState(2, 2, random_density(4, 6).matrix()));
  // a rank-1 projection contracts as <P|M|P>
  ComplexMatrix p = bloch_to_density({0, 0, 1}).matrix();
  ComplexMatrix via_elements = mmap_element(m, p, p);
  CHECK(max_abs(via_elements - contract(m, PreparationMap::projective(DensityMatrix(p)).superop())) < 1e-12);
  // bilinearity in the bra slot, antilinearity in the ket slot
  ComplexMatrix a = random_density(2, 9).matrix(), b = random_density(2, 10).matrix();
  const Complex z(0.3, -0.7);
  CHECK(max_abs(mmap_element(m, z * a, b) - z * mmap_element(m, a, b)) < 1e-12);
  CHECK(max_abs(mmap_element(m, a, z * b) - std::conj(z) * mmap_element(m, a, b)) < 1e-12);
}

TEST_CASE("design row") {
  const double h = 1 / std::sqrt(2.0);
  auto row = mmap_design_row({h, 0, h});
  std::array<double, 9> want{0.5, 0, 0.5, h, 0, h, 0, 0.5, 0};
  for (std::size_t i = 0; i < 9; ++i) CHECK(row[i] == doctest::Approx(want[i]));
  CHECK(mmap_protocol_vectors(MMapProtocol::Nine).size() == 9);
  CHECK(mmap_protocol_vectors(MMapProtocol::Twelve).size() == 12);
  for (const auto& v : mmap_protocol_vectors(MMapProtocol::Twelve)) CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("M-map tomography") {
  for (double c23 : {0.0, 0.5}) {
    auto u = heisenberg_unitary(kPi / 7);
    auto rho = family({0.1, -0.2, 0.3}, c23);
    auto m = build_mmap(u, rho);
    auto direct = mmap_blocks(m);
    for (auto protocol : {MMapProtocol::Nine, MMapProtocol::Twelve}) {
      for (const auto& oracle_fn : {mmap_oracle(m), simulation_oracle(u, rho)}) {
        auto fit = mmap_tomography(oracle_fn, protocol);
        CHECK(fit.residual < 1e-12);
        for (std::size_t k = 0; k < 9; ++k) CHECK(max_abs(fit.blocks[k] - direct[k]) < 1e-12);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
          auto probe = density_to_bloch(DensityMatrix::pure(random_pure_state(2, seed)).matrix());
          auto want = oracle_fn(probe);
          auto got = fit.predict_sample(probe);
          CHECK(got.probability == doctest::Approx(want.probability).epsilon(1e-12));
          CHECK(max_abs(got.output - want.output) < 1e-11);
        }
      }
    }
  }
}

TEST_CASE("M-map tomography on random dilations") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    BipartiteState rho(2, 3, random_density(6, seed + 60).matrix());
    auto m = build_mmap(random_unitary(6, seed + 70), rho);
    auto fit = mmap_tomography(mmap_oracle(m), MMapProtocol::Twelve);
    auto direct = mmap_blocks(m);
    for (std::size_t k = 0; k < 9; ++k) CHECK(max_abs(fit.blocks[k] - direct[k]) < 1e-12);
  }
}

TEST_CASE("partial M-map refuses mixed probes and degenerate protocols") {
  auto m = build_mmap(heisenberg_unitary(0.4), family({}, 0.5));
  auto fit = mmap_tomography(mmap_oracle(m), MMapProtocol::Nine);
  CHECK_THROWS_AS(fit.predict({0.5, 0, 0}), Error);

  auto rec = twelve_projection_record(mmap_oracle(m));
  rec.rows.resize(6);
  try {
    mmap_tomography(rec);
    FAIL("expected degenerate protocol");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ProtocolDegenerate);
  }

  // a pure initial system state annihilates one projection
  auto up = build_mmap(heisenberg_unitary(0.4), BipartiteState::product(bloch_to_density({0, 0, 1}).matrix(), identity(2) / 2.0));
  try {
    mmap_tomography(mmap_oracle(up), MMapProtocol::Nine);
    FAIL("expected zero probability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroProbability);
  }
}

TEST_CASE("sum rules") {
  const double x = kPi / 3;
  auto u = heisenberg_unitary(x / 2);

  SUBCASE("stochastic record is linear") {
    auto rho = family({0.1, 0.2, 0.3}, 0.5);
    auto pin = PreparationMap::pin(DensityMatrix::basis_state(2, 0));
    std::vector<PreparationMap> preps;
    for (const auto& a : mmap_protocol_vectors(MMapProtocol::Twelve))
      preps.push_back(PreparationMap::composite({pin, PreparationMap::rotation(rotation_to_bloch(a))}));
    auto rep = sum_rule_check(simulate_process(u, rho, preps));
    CHECK(rep.verdict == SumRuleVerdict::Linear);
    for (const auto& r : rep.linear) CHECK(r.residual < 1e-12);
    for (const auto& r : rep.mmap) CHECK(r.residual < 1e-12);
    CHECK(rep.completeness_residual == doctest::Approx(1.0));
  }

  SUBCASE("projective record on correlated state obeys only the M-map rules") {
    auto rho = family({0.1, 0.2, 0.3}, 0.5);
    auto rep = sum_rule_check(twelve_projection_record(simulation_oracle(u, rho)));
    CHECK(rep.verdict == SumRuleVerdict::MMap);
    for (const auto& r : rep.mmap) CHECK(r.residual < 1e-12);
    CHECK(rep.completeness_residual < 1e-12);
  }

  SUBCASE("projective record on a product state is linear") {
    auto rho = family({0.1, 0.2, 0.3}, 0.0);
    auto rep = sum_rule_check(twelve_projection_record(simulation_oracle(u, rho)));
    CHECK(rep.verdict == SumRuleVerdict::Linear);
  }

  SUBCASE("perturbed record satisfies neither") {
    auto rec = twelve_projection_record(simulation_oracle(u, family({}, 0.5)));
    rec.rows[6].output += 1e-3 * pauli(1);
    CHECK(sum_rule_check(rec).verdict == SumRuleVerdict::Neither);
  }

  SUBCASE("rows are matched by input and missing rows are reported") {
    auto rec = twelve_projection_record(simulation_oracle(u, family({}, 0.5)));
    auto reversed = rec;
    std::reverse(reversed.rows.begin(), reversed.rows.end());
    CHECK(sum_rule_check(reversed).verdict == sum_rule_check(rec).verdict);
    rec.rows.erase(rec.rows.begin() + 10);
    try {
      sum_rule_check(rec);
      FAIL("expected missing rows");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingRows);
      CHECK(std::string(e.what()).find("5-") != std::string::npos);
    }
  }
}
