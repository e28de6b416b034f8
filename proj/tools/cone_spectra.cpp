// Batch front end: cone-spectra --config cfg.json --command NAME [--out report.json] [--tol-scale F]
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cone_spectra/report.hpp"

using namespace cone_spectra;

namespace {

int emit(const Json& report, const std::string& out) {
  const std::string text = render(report);
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return 4;
  }
  return 0;
}

void summary(const Json& report) {
  for (const auto& c : report["checks"])
    std::cerr << (c["pass"].get<bool>() ? "  ok    " : "  FAIL  ") << c["name"].get<std::string>() << "  "
              << c["value"].dump() << " (" << c["comparison"].get<std::string>() << " " << c["tolerance"].dump() << ")\n";
  std::cerr << report["command"].get<std::string>() << ": " << report["status"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral invariants of genus-2 flat surfaces with one conical point"};
  std::string config_path, command, out;
  double tol_scale = 0;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--command", command, "periods | smatrix | cone | green | z5-audit")
      ->required()
      ->check(CLI::IsMember({"periods", "smatrix", "cone", "green", "z5-audit"}));
  app.add_option("--out", out, "write the JSON report here instead of stdout");
  app.add_option("--tol-scale", tol_scale, "multiply every check tolerance")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::ifstream f(config_path);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot read config file " + config_path);
    Json j;
    try {
      j = Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg = parse_config(j);
    if (tol_scale > 0) cfg.tol_scale = tol_scale;
    const Json report = run_command(command, cfg);
    summary(report);
    const int rc = emit(report, out);
    if (rc != 0) return rc;
    // a failed check is an inconsistency; the report is still written
    return report["status"] == "pass" ? 0 : exit_code(ErrorKind::ConsistencyFailure);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    emit(error_report(command, e), out);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
