#include "qproc/cli.hpp"

#include "qproc/io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iomanip>

namespace qproc {

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotCompletelyPositive:
    case ErrorKind::LinearDependence:
    case ErrorKind::ZeroProbability:
    case ErrorKind::ProtocolDegenerate:
      return kExitInconsistent;
    default:
      return kExitUsage;
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file_atomic(path, text);
}

ScenarioParams parse_params(const std::vector<std::string>& items) {
  ScenarioParams p;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::InvalidArgument, "--param expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw Error(ErrorKind::InvalidArgument, "parameter " + key + " is not a number: '" + value + "'");
    p[key] = v;
  }
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process tomography of open two-level systems with initial correlations"};
  app.require_subcommand(1);

  std::string name, format = "csv", out_path, record_path, config_path;
  std::vector<std::string> params;

  auto* scenario = app.add_subcommand("scenario", "Run a named scenario over the 2 omega t grid");
  scenario->add_option("name", name, "Scenario name")->required();
  scenario->add_option("--param", params, "Override key=value (repeatable)");
  scenario->add_option("--out", out_path, "Output file (default stdout)");
  scenario->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct and classify the linear map of a record");
  reconstruct->add_option("--record", record_path, "TomographyRecord JSON")->required();
  reconstruct->add_option("--out", out_path, "Output file (default stdout)");

  auto* diagnose = app.add_subcommand("diagnose", "Sum-rule diagnosis of a twelve-projection record");
  diagnose->add_option("--record", record_path, "TomographyRecord JSON")->required();
  diagnose->add_option("--out", out_path, "Also write the report as JSON");

  auto* mmap = app.add_subcommand("mmap-tomography", "Recover the partial M-map from projective records");
  mmap->add_option("--record", record_path, "TomographyRecord JSON")->required();
  mmap->add_option("--out", out_path, "Output file (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Simulate a tomography record from a configuration");
  sim->add_option("--config", config_path, "Simulation config JSON")->required();
  sim->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Tolerances tol = Tolerances::from_environment();

    if (*scenario) {
      const auto result = run_scenario(name, parse_params(params));
      emit(out_path, format == "json" ? scenario_to_json(result).dump(2) + "\n" : scenario_to_csv(result), out);
      return kExitOk;
    }

    if (*reconstruct) {
      const auto record = record_from_json(read_json_file(record_path));
      const auto map = reconstruct_linear_map(record);
      const double residual = interpolation_residual(map, record);
      const auto positivity = classify_positivity(map, kDefaultPositivitySamples, tol);
      Json doc = {{"map", superop_to_json(map)},
                  {"positivity", positivity_to_json(positivity)},
                  {"interpolation_residual", residual}};
      emit(out_path, doc.dump(2) + "\n", out);
      if (residual > 1e-6) {
        err << "record is not reproduced by a linear map (interpolation residual " << fmt(residual) << ")\n";
        return kExitInconsistent;
      }
      return kExitOk;
    }

    if (*diagnose) {
      const auto rep = sum_rule_check(record_from_json(read_json_file(record_path)));
      for (const auto& r : rep.linear)
        out << "linear  " << std::left << std::setw(26) << r.name << fmt(r.residual) << (r.pass ? "  pass\n" : "  FAIL\n");
      for (const auto& r : rep.mmap)
        out << "mmap    " << std::left << std::setw(26) << r.name << fmt(r.residual) << (r.pass ? "  pass\n" : "  FAIL\n");
      out << "probability completeness residual " << fmt(rep.completeness_residual) << "\n";
      out << "verdict " << to_string(rep.verdict) << "\n";
      if (!out_path.empty()) write_file_atomic(out_path, sum_rules_to_json(rep).dump(2) + "\n");
      return kExitOk;
    }

    if (*mmap) {
      const auto fit = mmap_tomography(record_from_json(read_json_file(record_path)));
      emit(out_path, partial_mmap_to_json(fit).dump(2) + "\n", out);
      return kExitOk;
    }

    if (*sim) {
      const auto config = simulation_config_from_json(read_json_file(config_path), tol);
      emit(out_path, record_to_json(simulate(config, tol)).dump(2) + "\n", out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    err << "error (malformed JSON): " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qproc
