#include "doctest.h"
#include "oracles.hpp"
#include "qproc/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace qproc;

namespace {

TomographyRecord sample_record() {
  auto rho = BipartiteState(TwoQubitParams::correlated_c23({}, 0.5));
  std::vector<PreparationMap> preps = stochastic_preparations(tomographic_bloch_set());
  preps.push_back(PreparationMap::projective(bloch_to_density({0, 1, 0})));
  preps.push_back(PreparationMap::pin(DensityMatrix::maximally_mixed(2), bloch_to_density({0, 0, 1})));
  preps.push_back(PreparationMap::identity(2));
  return simulate_process(heisenberg_unitary(0.3), rho, preps);
}

}  // namespace

TEST_CASE("matrix JSON round trip") {
  auto m = random_unitary(3, 4).matrix();
  auto j = matrix_to_json(m);
  CHECK(j["rows"] == 3);
  CHECK(j["entries"].size() == 9);
  CHECK(matrix_from_json(Json::parse(j.dump())) == m);

  auto real = Json::parse(R"({"rows": 1, "cols": 2, "entries": [1.5, [0, -2]]})");
  auto r = matrix_from_json(real);
  CHECK(r(0, 0) == Complex(1.5, 0));
  CHECK(r(0, 1) == Complex(0, -2));

  for (const char* badj : {R"({"rows": 2, "cols": 2, "entries": [1, 2, 3]})", R"({"rows": 1, "entries": [1]})",
                           R"({"rows": 1, "cols": 1, "entries": ["x"]})", R"([1, 2])"}) {
    try {
      matrix_from_json(Json::parse(badj));
      FAIL("expected rejection of " << badj);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
  }
}

TEST_CASE("map and M-map JSON round trips") {
  auto s = map_from_contraction(random_unitary(4, 1), random_density(2, 2));
  auto back = superop_from_json(Json::parse(superop_to_json(s).dump()));
  CHECK(back.form() == s.form());
  CHECK(back.matrix() == s.matrix());
  auto a = superop_from_json(superop_to_json(s.to(MapForm::A)));
  CHECK(a.form() == MapForm::A);

  auto m = build_mmap(random_unitary(4, 3), BipartiteState(2, 2, random_density(4, 4).matrix()));
  auto mj = mmap_to_json(m);
  CHECK(mj["dim"] == 2);
  CHECK(mj["entries"].size() == 64);
  CHECK(mmap_from_json(Json::parse(mj.dump())).matrix() == m.matrix());
  mj["dim"] = 3;
  CHECK_THROWS_AS(mmap_from_json(mj), Error);

  auto fit = mmap_tomography(mmap_oracle(m), MMapProtocol::Nine);
  auto pj = partial_mmap_to_json(fit);
  CHECK(pj["blocks"].contains("X23"));
  auto fit2 = partial_mmap_from_json(Json::parse(pj.dump()));
  for (std::size_t k = 0; k < 9; ++k) CHECK(fit2.blocks[k] == fit.blocks[k]);
}

TEST_CASE("record JSON round trip keeps preparations") {
  auto rec = sample_record();
  auto j = record_to_json(rec);
  CHECK(j["protocol"] == "Stochastic");
  CHECK(j["rows"][0]["prep"]["kind"] == "composite");
  CHECK(j["rows"][5]["prep"]["params"].contains("environment"));
  auto back = record_from_json(Json::parse(j.dump()));
  REQUIRE(back.rows.size() == rec.rows.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    CHECK(back.rows[i].label == rec.rows[i].label);
    CHECK(back.rows[i].probability == rec.rows[i].probability);
    CHECK(back.rows[i].output == rec.rows[i].output);
    REQUIRE(back.rows[i].prep.has_value());
    CHECK(back.rows[i].prep->kind() == rec.rows[i].prep->kind());
    CHECK(max_abs(back.rows[i].prep->superop().matrix() - rec.rows[i].prep->superop().matrix()) == 0.0);
  }
  CHECK(record_to_json(back) == j);

  auto no_prep = Json::parse(R"({"rows": [{"input": {"rows": 1, "cols": 1, "entries": [1]},
                                            "output": {"rows": 1, "cols": 1, "entries": [1]}}]})");
  auto r = record_from_json(no_prep);
  CHECK(r.protocol == Protocol::External);
  CHECK(r.rows[0].probability == 1.0);

  auto mismatch = j;
  mismatch["rows"][1]["output"] = matrix_to_json(identity(3));
  CHECK_THROWS_AS(record_from_json(mismatch), Error);
  auto unknown = j;
  unknown["rows"][0]["prep"]["kind"] = "teleport";
  CHECK_THROWS_AS(record_from_json(unknown), Error);
}

TEST_CASE("preparation shorthand") {
  auto p = preparation_from_json(Json::parse(R"({"kind": "projective", "params": {"bloch": [0, 0, -1]}})"));
  CHECK(max_abs(*p.operand() - bloch_to_density({0, 0, -1}).matrix()) < 1e-15);
  auto c = preparation_from_json(Json::parse(
      R"({"kind": "composite", "params": {"steps": [{"kind": "pin", "params": {"bloch": [0, 0, 1]}},
                                                     {"kind": "rotation", "params": {"control_error": 0.1}}]}})"));
  auto want = PreparationMap::composite({PreparationMap::pin(DensityMatrix::basis_state(2, 0)),
                                         PreparationMap::rotation(control_error_rotation(0.1))});
  CHECK(max_abs(c.superop().matrix() - want.superop().matrix()) < 1e-15);
  CHECK_THROWS_AS(preparation_from_json(Json::parse(R"({"kind": "rotation", "params": {}})")), Error);
}

TEST_CASE("simulation config") {
  auto cfg_json = Json::parse(R"({
    "U": {"kind": "heisenberg_swap", "omega_t": 0.7853981633974483},
    "rhoSE": {"family": {"a": [0, 0, 0], "c23": 0.5}},
    "protocol": "Projective",
    "preps": [
      {"kind": "projective", "params": {"bloch": [-1, 0, 0]}},
      {"kind": "projective", "params": {"bloch": [1, 0, 0]}},
      {"kind": "projective", "params": {"bloch": [0, 1, 0]}},
      {"kind": "projective", "params": {"bloch": [0, 0, 1]}}
    ]})");
  auto rec = simulate(simulation_config_from_json(cfg_json));
  CHECK(rec.protocol == Protocol::Projective);
  auto map = reconstruct_linear_map(rec);
  CHECK(oracle::maxdiff(map.matrix(), ComplexMatrix(oracle::lambda_p(std::numbers::pi / 2, 0.5))) < 1e-12);

  auto shots = cfg_json;
  shots["shots"] = 100000;
  shots["seed"] = 1;
  auto a = record_to_json(simulate(simulation_config_from_json(shots))).dump();
  auto b = record_to_json(simulate(simulation_config_from_json(shots))).dump();
  CHECK(a == b);
  CHECK(a != record_to_json(rec).dump());

  auto bad_dims = cfg_json;
  bad_dims["U"] = {{"matrix", matrix_to_json(identity(8))}};
  try {
    simulation_config_from_json(bad_dims);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("scenario serialization") {
  auto r = run_scenario("fig2_1", {{"points", 5}});
  auto csv = scenario_to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "two_omega_t,lambda_1,lambda_2,lambda_3,lambda_4");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 5);
    CHECK(cells[0] == doctest::Approx(r.curves[row].x).epsilon(1e-11));
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs(cells[k + 1] - r.curves[row].values[k]) <= 1e-11 * std::max(1.0, std::abs(r.curves[row].values[k])));
    ++row;
  }
  CHECK(row == 5);

  auto j = scenario_to_json(r);
  CHECK(j["name"] == "fig2_1");
  CHECK(j["curves"].size() == 5);
  CHECK(j["params"]["c23"] == 0.5);
  CHECK(j["matrices"].contains("map_at_half_pi"));
}

TEST_CASE("polarization table sample") {
  auto t = polarization_from_json(read_json_file(std::string(QPROC_DATA_DIR) + "/optical_lattice_polarization.json"));
  CHECK(t.projectors == std::vector<std::string>{"P3-", "P3+", "P1+", "P2+"});
  CHECK(t.states == std::vector<std::string>{"g", "I", "r", "i"});
  CHECK(t.probabilities[0][0] == 0.90);
  CHECK(t.probabilities[3][3] == 0.37);
  CHECK(polarization_from_json(Json::parse(polarization_to_json(t).dump())).probabilities == t.probabilities);
  // the two sigma_3 rows are complementary
  for (std::size_t s = 0; s < 4; ++s) CHECK(t.probabilities[0][s] + t.probabilities[1][s] == doctest::Approx(1.0));

  auto a = t.implied_bloch_vectors();
  CHECK(a[0].a3 == doctest::Approx(-0.8));
  CHECK(a[0].a1 == doctest::Approx(0.64));
  CHECK(a[3].a2 == doctest::Approx(-0.26));
  // the ground-state column taken at face value lies outside the Bloch ball
  CHECK(a[0].norm() > 1.0);
  for (std::size_t s = 1; s < 4; ++s) CHECK(a[s].norm() < 1.0);

  auto broken = polarization_to_json(t);
  broken["probabilities"][0][0] = 1.2;
  CHECK_THROWS_AS(polarization_from_json(broken), Error);
}

TEST_CASE("atomic file writes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qproc_io_test";
  fs::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  CHECK(s == "second");
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename() == "out.txt");
  CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.txt").string(), "x"), Error);
  CHECK_THROWS_AS(read_json_file((dir / "nope.json").string()), Error);
  fs::remove_all(dir);
}
