#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cone_spectra/green.hpp"

namespace cone_spectra {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "cone-spectra/1";
inline constexpr const char* kToolVersion = "1.0.0";

struct CurveSpec {
  std::string type = "z5";  // "z5" or "generic"
  cplx lambda1 = 0.0;
  double r = 1.0;
  std::vector<cplx> branch_points;
  std::optional<cplx> base;
  Curve build() const;
};

struct PointSpec {
  cplx lambda;
  int sheet = 1;
};

/// Batch configuration. Every check tolerance is multiplied by tol_scale.
struct RunConfig {
  CurveSpec curve;
  int cone_point = 0;
  int series_order = 16;
  int branch_tag = 0;
  QuadratureConfig quad;
  double classification_tol = 1e-6;
  double tol_scale = 1.0;
  std::vector<double> lambdas{-1.0, -8.0};
  // green
  std::vector<PointSpec> points;  // empty: ten fixed interior points
  double matching_radius = 0.1;
  double bergman_step = 1e-3;
  int bergman_pairs = 3;
  SurfaceGridConfig mean_grid{16, 24, 0.0};
  // z5-audit
  double perturbation = 0.05;
  int perturbed_point = 1;
};

/// Throws Error(InvalidConfig) on malformed input.
RunConfig parse_config(const Json& j);
Json config_to_json(const RunConfig& c);

/// Default Green evaluation points for a curve: ten points on alternating
/// sheets, away from the branch points.
std::vector<PointSpec> default_green_points(const Curve& c);

Json cmd_periods(const RunConfig& cfg);
Json cmd_smatrix(const RunConfig& cfg);
Json cmd_cone(const RunConfig& cfg);
Json cmd_green(const RunConfig& cfg);
Json cmd_z5_audit(const RunConfig& cfg);

/// Full report: schema, tool, command, config echo, result, checks, status.
/// Throws Error(InvalidConfig) for an unknown command.
Json run_command(const std::string& command, const RunConfig& cfg);
/// Error report for a failed run.
Json error_report(const std::string& command, const Error& e);
/// Deterministic serialization (two-space indent, trailing newline).
std::string render(const Json& report);

}  // namespace cone_spectra
