#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cone_spectra/report.hpp"

using namespace cone_spectra;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConsistencyFailure;
}

const Json* find_check(const Json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("cone_spectra_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const fs::path& cfg, const std::string& command, const fs::path& out) {
  const std::string cmd = std::string("\"") + CONE_SPECTRA_EXE + "\" --config \"" + cfg.string() + "\" --command " +
                          command + " --out \"" + out.string() + "\" 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d = parse_config(Json::object());
  CHECK(d.curve.type == "z5");
  CHECK(d.series_order == 16);
  CHECK(d.lambdas == std::vector<double>{-1.0, -8.0});

  const RunConfig c = parse_config(Json::parse(R"({
    "curve": {"type": "generic", "branch_points": [[0,0],[1,0],[0.3,0.9],[-0.8,0.6],[-0.8,-0.6],[0.3,-0.9]]},
    "cone_point": 2, "tolerances": {"scale": 3},
    "green": {"points": [{"lambda": [0.1, 0.2], "sheet": -1}, [0.4, -0.3]], "mean_grid": {"radial": 8}}})"));
  CHECK(c.curve.branch_points.size() == 6);
  CHECK(c.curve.branch_points[2] == cplx(0.3, 0.9));
  CHECK(c.cone_point == 2);
  CHECK(c.tol_scale == 3.0);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].sheet == -1);
  CHECK(c.points[1].lambda == cplx(0.4, -0.3));
  CHECK(c.mean_grid.radial == 8);

  // the echoed config parses back to itself
  const Json echo = config_to_json(c);
  CHECK(config_to_json(parse_config(echo)) == echo);

  auto bad = [](const char* text) { return kind_of([&] { parse_config(Json::parse(text)); }); };
  CHECK(bad(R"({"bogus": 1})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"({"curve": {"type": "torus"}})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"({"series_order": 8})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"({"cone_point": "two"})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"({"tolerances": {"scale": 0}})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"({"quadrature": {"rel_tol": -1}})") == ErrorKind::InvalidConfig);
  CHECK(bad(R"([1, 2])") == ErrorKind::InvalidConfig);
}

TEST_CASE("validation errors map to exit code 2") {
  RunConfig dup = parse_config(Json::parse(R"({"curve": {"type": "generic", "branch_points": [0, 1, 2, 3, 4, 1]}})"));
  const ErrorKind k = kind_of([&] { cmd_periods(dup); });
  CHECK(k == ErrorKind::DuplicateBranchPoints);
  CHECK(exit_code(k) == 2);

  RunConfig pos;
  pos.lambdas = {1.0};
  CHECK(exit_code(kind_of([&] { cmd_cone(pos); })) == 2);

  RunConfig few;
  few.points = {{cplx(0.3, 0.2), 1}};
  CHECK(exit_code(kind_of([&] { cmd_green(few); })) == 2);

  CHECK(exit_code(kind_of([&] { run_command("plot", RunConfig{}); })) == 2);

  const Json e = error_report("periods", Error(ErrorKind::DuplicateBranchPoints, "x"));
  CHECK(e["schema"] == kReportSchema);
  CHECK(e["status"] == "error");
  CHECK(e["error"]["exit_code"] == 2);
}

TEST_CASE("cone command") {
  RunConfig cfg;
  const Json r = run_command("cone", cfg);
  CHECK(r["status"] == "pass");
  const Json& rows = r["result"]["entries"];
  REQUIRE(rows.size() == 2);
  // (-λ)^{1/3} = 2 at λ = -8; c₁ from the gamma function
  const double c1 = std::pow(2.0, -2.0 / 3) * std::tgamma(2.0 / 3) / std::tgamma(4.0 / 3) * 2 * std::sqrt(3.0) /
                    std::acos(-1.0);
  CHECK(std::abs(r["result"]["c1"].get<double>() / c1 - 1) < 1e-12);
  CHECK(std::abs(rows[1]["s1"].get<double>() + 2 * c1) < 1e-12);
  CHECK(std::abs(rows[0]["detP_asym"].get<double>() - 27 / (2 * std::pow(std::acos(-1.0), 2))) < 1e-12);
}

TEST_CASE("periods report") {
  RunConfig cfg;
  const Json r = run_command("periods", cfg);
  CHECK(r["schema"] == "cone-spectra/1");
  CHECK(r["tool"]["version"] == kToolVersion);
  CHECK(r["config"] == config_to_json(cfg));
  CHECK(r["status"] == "pass");
  const Json* spd = find_check(r, "Im B minimal eigenvalue");
  REQUIRE(spd != nullptr);
  CHECK((*spd)["pass"] == true);
  // every check carries its measured value and tolerance
  for (const auto& c : r["checks"]) {
    CHECK(c.contains("value"));
    CHECK(c.contains("tolerance"));
    CHECK((c["comparison"] == "<=" || c["comparison"] == ">"));
  }

  // tightened rel_tol: same B within the previous error estimate
  RunConfig tight = cfg;
  tight.quad.rel_tol = 1e-13;
  const Json t = run_command("periods", tight);
  const double est = r["result"]["period_error_estimate"].get<double>();
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int q = 0; q < 2; ++q)
        CHECK(std::abs(t["result"]["B"][i][k][q].get<double>() - r["result"]["B"][i][k][q].get<double>()) <=
              std::max(est, 1e-14));

  // rendering is deterministic
  CHECK(render(r) == render(run_command("periods", cfg)));
}

TEST_CASE("smatrix and z5-audit reports") {
  RunConfig cfg;
  const Json s = run_command("smatrix", cfg);
  CHECK(s["status"] == "pass");
  CHECK(s["result"]["classification"] == "dimension 3 signature");

  const Json z = run_command("z5-audit", cfg);
  for (const char* n : {"S_Sch(0)", "T11", "T12", "T21", "T22", "T41"}) CHECK(z["result"]["vanishing"][n] < 1e-6);
  CHECK(z["result"]["perturbed"]["classification"] == "generic: dim Ker Δ_sing = 1 (conjectural)");

  // cone at a branch point: the holomorphic comparison degenerates
  RunConfig bp = cfg;
  bp.cone_point = 1;
  const Json w = run_command("smatrix", bp);
  CHECK(w["result"]["ratio_note"].get<std::string>().find("Weierstrass") != std::string::npos);
  CHECK(w["result"]["normalized_detP0"] < 1e-6);
}

TEST_CASE("command line") {
  Scratch s;
  const fs::path z5 = s.write("z5.json", R"({"curve": {"type": "z5", "lambda1": 0, "r": 1}})");
  for (const char* cmd : {"periods", "smatrix", "cone"}) {
    CAPTURE(cmd);
    const fs::path a = s.dir / "a.json", b = s.dir / "b.json";
    CHECK(run(z5, cmd, a) == 0);
    CHECK(run(z5, cmd, b) == 0);
    const std::string ta = slurp(a);
    CHECK(!ta.empty());
    CHECK(ta == slurp(b));
    CHECK(Json::parse(ta)["schema"] == "cone-spectra/1");
  }
  const fs::path out = s.dir / "out.json";
  CHECK(run(s.write("bad.json", "{ not json"), "periods", out) == 2);
  CHECK(run(s.write("key.json", R"({"bogus": 1})"), "periods", out) == 2);
  CHECK(run(s.write("dup.json", R"({"curve": {"type": "generic", "branch_points": [0,1,2,3,4,1]}})"), "periods",
            out) == 2);
  CHECK(Json::parse(slurp(out))["error"]["kind"] == "DuplicateBranchPoints");
  CHECK(run(s.write("pos.json", R"({"lambdas": [1.0]})"), "cone", out) == 2);
  CHECK(run(z5, "plot", out) == 2);
  CHECK(run(s.dir / "missing.json", "periods", out) == 2);
  // the conjectural genericity check fails on the default perturbation: report written, exit 4
  CHECK(run(z5, "z5-audit", out) == 4);
  CHECK(Json::parse(slurp(out))["status"] == "fail");
}
