#include "cone_spectra/report.hpp"

#include "cone_spectra/cone.hpp"
#include "cone_spectra/smatrix.hpp"

namespace cone_spectra {

namespace {

Json cj(cplx z) { return Json::array({z.real(), z.imag()}); }

template <class M>
Json mj(const M& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.cols(); ++k) {
      if constexpr (std::is_same_v<typename M::Scalar, cplx>)
        r.push_back(cj(m(i, k)));
      else
        r.push_back(m(i, k));
    }
    rows.push_back(r);
  }
  return rows;
}

cplx read_cplx(const Json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::InvalidConfig, std::string(what) + " must be a number or [re, im]");
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("bad value for '") + key + "'");
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw Error(ErrorKind::InvalidConfig, std::string("unknown key '") + it.key() + "' in " + where);
  }
}

/// pass/fail records; tolerances are scaled by tol_scale
class Checks {
 public:
  explicit Checks(double scale) : scale_(scale) {}
  void at_most(const std::string& name, double value, double tol) {
    push(name, value, tol * scale_, "<=", value <= tol * scale_);
  }
  /// lower bounds are not scaled
  void at_least(const std::string& name, double value, double bound) { push(name, value, bound, ">", value > bound); }
  const Json& json() const { return a_; }

 private:
  void push(const std::string& name, double value, double tol, const char* cmp, bool pass) {
    a_.push_back(Json{{"name", name}, {"value", value}, {"tolerance", tol}, {"comparison", cmp}, {"pass", pass}});
  }
  double scale_;
  Json a_ = Json::array();
};

Json with_checks(Json data, const Checks& ch) {
  data["checks"] = ch.json();
  return data;
}

PeriodData periods_for(const Curve& c, const RunConfig& cfg) {
  if (cfg.cone_point < 0 || cfg.cone_point > 5) throw Error(ErrorKind::InvalidConfig, "cone_point must be in 0..5");
  return period_data(c, cfg.cone_point, cfg.quad);
}

double min_eigenvalue(const Eigen::Matrix2d& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().minCoeff();
}

SurfacePoint point_of(const Curve& c, const PointSpec& p) {
  if (c.branch_index_of(p.lambda, 1e-9) >= 0)
    throw Error(ErrorKind::ConeArgument, "evaluation point coincides with a branch point");
  if (p.sheet != 1 && p.sheet != -1) throw Error(ErrorKind::InvalidConfig, "sheet must be +1 or -1");
  return c.point(p.lambda, p.sheet);
}

// points away from the convex hull of the branch points, for cycle integrals of W(z, ·)
std::vector<SurfacePoint> gate_points(const Curve& c) {
  std::vector<SurfacePoint> z;
  for (int t = 0; t < 5; ++t) {
    const cplx l = c.centroid() + c.diameter() * (1.2 + 0.1 * t) * std::polar(1.0, 0.7 + 1.1 * t);
    z.push_back(c.point(l, t % 2 ? -1 : 1));
  }
  return z;
}

Json bidiff_gate(const Curve& c, const PeriodData& pd, const RunConfig& cfg, Checks& ch) {
  Bidiff w(c, pd, c.centroid());
  QuadratureConfig pc = cfg.quad;
  pc.rel_tol = std::min(pc.rel_tol, 1e-11);
  double a_max = 0, b_max = 0, sym = 0, anti = 0;
  const auto zs = gate_points(c);
  for (const auto& z : zs) {
    const Eigen::Vector2cd v = pd.v(z);
    for (int a = 0; a < 2; ++a) {
      a_max = std::max(a_max, std::abs(w.cycle_period(z, a, pc).value));
      b_max = std::max(b_max, std::abs(w.cycle_period(z, 2 + a, pc).value - 2 * kPi * kI * v(a)) / v.norm());
    }
  }
  for (size_t i = 0; i < zs.size(); ++i) {
    const SurfacePoint& x1 = zs[i];
    const SurfacePoint x2 = c.point(0.5 * (zs[(i + 2) % zs.size()].lambda + c.centroid()), i % 2 ? 1 : -1);
    const cplx w12 = w(x1, x2);
    sym = std::max(sym, std::abs(w12 - w(x2, x1)) / std::max(1.0, std::abs(w12)));
  }
  // W(x, x*) finite, and W(x, ·) continuous there (no pole at the antipode)
  for (const auto& x : zs) {
    const SurfacePoint xs0 = c.opposite(x);
    const cplx w0 = w(x, xs0);
    const double h = 1e-4 * c.diameter();
    const cplx l2 = x.lambda + cplx(h, 0.5 * h);
    const SurfacePoint xs{l2, c.continue_segment(xs0.lambda, xs0.y, l2), -1};
    anti = std::max(anti, std::abs(w(x, xs) - w0) / (h * std::max(1.0, std::abs(w0))));
  }
  ch.at_most("W a-periods", a_max, 1e-6);
  ch.at_most("W b-period identity (relative)", b_max, 1e-4);
  ch.at_most("W symmetry", sym, 1e-8);
  ch.at_most("W antipodal difference quotient", anti, 1e3);
  return Json{{"a_period_max", a_max},
              {"b_period_rel_error", b_max},
              {"symmetry_error", sym},
              {"antipode_difference_quotient", anti},
              {"normalization_asymmetry", w.normalization_asymmetry()}};
}

Json smatrix_json(const SMatrixZero& s, const DetRatios& r, const KernelDiagnostics& k) {
  Json audit = Json::object();
  for (const auto& [n, v] : k.audit) audit[n] = v;
  return Json{{"T0", mj(s.T0)},
              {"P0", mj(s.P0)},
              {"detT0", cj(s.detT0)},
              {"detP0", cj(s.detP0)},
              {"detT0_closed_form", cj(s.detT0_closed)},
              {"normalized_detT0", s.norm_detT0},
              {"normalized_detP0", s.norm_detP0},
              {"piB", s.piB},
              {"ratio_sing", cj(r.ratio_sing)},
              {"ratio_hol", cj(r.ratio_hol)},
              {"ratio_note", r.note},
              {"classification", k.classification},
              {"friedrichs", k.friedrichs},
              {"weierstrass", k.weierstrass},
              {"audit", audit}};
}

}  // namespace

Curve CurveSpec::build() const {
  if (type == "z5") {
    if (!(r > 0)) throw Error(ErrorKind::InvalidConfig, "z5 radius must be positive");
    return Curve::z5(lambda1, r);
  }
  if (type == "generic") {
    if (branch_points.size() != 6) throw Error(ErrorKind::InvalidConfig, "a generic curve needs six branch points");
    return base ? Curve(branch_points, *base) : Curve(branch_points);
  }
  throw Error(ErrorKind::InvalidConfig, "curve type must be 'z5' or 'generic'");
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  reject_unknown(j,
                 {"curve", "cone_point", "series_order", "branch_tag", "quadrature", "tolerances", "lambdas", "green",
                  "z5_audit"},
                 "config");
  RunConfig c;
  if (j.contains("curve")) {
    const Json& cv = j["curve"];
    if (!cv.is_object()) throw Error(ErrorKind::InvalidConfig, "'curve' must be an object");
    reject_unknown(cv, {"type", "lambda1", "r", "branch_points", "base"}, "curve");
    read(cv, "type", c.curve.type);
    if (c.curve.type != "z5" && c.curve.type != "generic")
      throw Error(ErrorKind::InvalidConfig, "curve type must be 'z5' or 'generic'");
    if (cv.contains("lambda1")) c.curve.lambda1 = read_cplx(cv["lambda1"], "lambda1");
    read(cv, "r", c.curve.r);
    if (cv.contains("branch_points")) {
      if (!cv["branch_points"].is_array()) throw Error(ErrorKind::InvalidConfig, "branch_points must be an array");
      for (const auto& e : cv["branch_points"]) c.curve.branch_points.push_back(read_cplx(e, "branch point"));
    }
    if (cv.contains("base")) c.curve.base = read_cplx(cv["base"], "base");
  }
  read(j, "cone_point", c.cone_point);
  read(j, "series_order", c.series_order);
  read(j, "branch_tag", c.branch_tag);
  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    reject_unknown(q, {"rel_tol", "abs_tol", "max_subdivisions", "surface_grid"}, "quadrature");
    read(q, "rel_tol", c.quad.rel_tol);
    read(q, "abs_tol", c.quad.abs_tol);
    read(q, "max_subdivisions", c.quad.max_subdivisions);
    if (q.contains("surface_grid")) {
      const Json& g = q["surface_grid"];
      reject_unknown(g, {"radial", "angular", "R"}, "surface_grid");
      read(g, "radial", c.quad.surface_grid.radial);
      read(g, "angular", c.quad.surface_grid.angular);
      read(g, "R", c.quad.surface_grid.R);
    }
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    reject_unknown(t, {"classification", "scale"}, "tolerances");
    read(t, "classification", c.classification_tol);
    read(t, "scale", c.tol_scale);
  }
  read(j, "lambdas", c.lambdas);
  if (j.contains("green")) {
    const Json& g = j["green"];
    reject_unknown(g, {"points", "matching_radius", "bergman_step", "bergman_pairs", "mean_grid"}, "green");
    if (g.contains("points")) {
      for (const auto& p : g["points"]) {
        PointSpec ps;
        if (p.is_object()) {
          reject_unknown(p, {"lambda", "sheet"}, "green point");
          if (!p.contains("lambda")) throw Error(ErrorKind::InvalidConfig, "green point needs 'lambda'");
          ps.lambda = read_cplx(p["lambda"], "lambda");
          read(p, "sheet", ps.sheet);
        } else {
          ps.lambda = read_cplx(p, "green point");
        }
        c.points.push_back(ps);
      }
    }
    read(g, "matching_radius", c.matching_radius);
    read(g, "bergman_step", c.bergman_step);
    read(g, "bergman_pairs", c.bergman_pairs);
    if (g.contains("mean_grid")) {
      read(g["mean_grid"], "radial", c.mean_grid.radial);
      read(g["mean_grid"], "angular", c.mean_grid.angular);
    }
  }
  if (j.contains("z5_audit")) {
    const Json& z = j["z5_audit"];
    reject_unknown(z, {"perturbation", "perturbed_point"}, "z5_audit");
    read(z, "perturbation", c.perturbation);
    read(z, "perturbed_point", c.perturbed_point);
  }
  c.quad.validate();
  if (!(c.tol_scale > 0)) throw Error(ErrorKind::InvalidConfig, "tolerance scale must be positive");
  if (c.series_order < 14) throw Error(ErrorKind::InvalidConfig, "series_order must be at least 14");
  if (c.branch_tag < 0 || c.branch_tag > 2) throw Error(ErrorKind::InvalidConfig, "branch_tag must be 0, 1 or 2");
  if (c.perturbed_point < 0 || c.perturbed_point > 5) throw Error(ErrorKind::InvalidConfig, "perturbed_point must be in 0..5");
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json curve{{"type", c.curve.type}};
  if (c.curve.type == "z5") {
    curve["lambda1"] = cj(c.curve.lambda1);
    curve["r"] = c.curve.r;
  } else {
    Json e = Json::array();
    for (cplx b : c.curve.branch_points) e.push_back(cj(b));
    curve["branch_points"] = e;
    if (c.curve.base) curve["base"] = cj(*c.curve.base);
  }
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back(Json{{"lambda", cj(p.lambda)}, {"sheet", p.sheet}});
  return Json{{"curve", curve},
              {"cone_point", c.cone_point},
              {"series_order", c.series_order},
              {"branch_tag", c.branch_tag},
              {"quadrature",
               {{"rel_tol", c.quad.rel_tol},
                {"abs_tol", c.quad.abs_tol},
                {"max_subdivisions", c.quad.max_subdivisions},
                {"surface_grid",
                 {{"radial", c.quad.surface_grid.radial},
                  {"angular", c.quad.surface_grid.angular},
                  {"R", c.quad.surface_grid.R}}}}},
              {"tolerances", {{"classification", c.classification_tol}, {"scale", c.tol_scale}}},
              {"lambdas", c.lambdas},
              {"green",
               {{"points", pts},
                {"matching_radius", c.matching_radius},
                {"bergman_step", c.bergman_step},
                {"bergman_pairs", c.bergman_pairs},
                {"mean_grid", {{"radial", c.mean_grid.radial}, {"angular", c.mean_grid.angular}}}}},
              {"z5_audit", {{"perturbation", c.perturbation}, {"perturbed_point", c.perturbed_point}}}};
}

std::vector<PointSpec> default_green_points(const Curve& c) {
  std::vector<PointSpec> p;
  const double R = c.diameter();
  for (int k = 0; k < 10; ++k) {
    cplx l = c.centroid() + R * (0.18 + 0.05 * k) * std::polar(1.0, 0.45 + 2 * kPi * 0.37 * k);
    // keep clear of branch points
    for (int it = 0; it < 8; ++it) {
      double d = 1e300;
      cplx near = 0;
      for (cplx e : c.branch_points())
        if (std::abs(l - e) < d) d = std::abs(l - e), near = e;
      if (d > 0.15 * c.min_gap()) break;
      l = near + (l - near) * (0.3 * c.min_gap() / std::max(d, 1e-12));
    }
    p.push_back({l, k % 2 ? -1 : 1});
  }
  return p;
}

Json cmd_periods(const RunConfig& cfg) {
  const Curve c = cfg.curve.build();
  const PeriodData pd = periods_for(c, cfg);
  RunConfig fine = cfg;
  fine.quad.surface_grid.radial *= 2;
  fine.quad.surface_grid.angular *= 2;
  const double area_fine = metric_grid(c, cfg.cone_point, fine.quad.surface_grid).integrate([](cplx, int) { return 1.0; });
  Checks ch(cfg.tol_scale);
  const double spd = min_eigenvalue(pd.ImB);
  ch.at_most("B symmetry", pd.asymmetry(), 1e-8);
  ch.at_least("Im B minimal eigenvalue", spd, 0.0);
  ch.at_most("a-normalization", pd.a_normalization_error(), 1e-8);
  ch.at_most("area under grid doubling (relative)", std::abs(area_fine - pd.area) / pd.area, 1e-4);
  Json bp = Json::array();
  for (cplx e : c.branch_points()) bp.push_back(cj(e));
  return with_checks(Json{{"branch_points", bp},
                          {"homology_order", pd.cycles.order()},
                          {"B", mj(pd.Bmat)},
                          {"ImB", mj(pd.ImB)},
                          {"period_error_estimate", pd.period_error},
                          {"area", pd.area},
                          {"area_grid_doubled", area_fine},
                          {"area_bilinear", pd.area_bilinear},
                          {"asymmetry", pd.asymmetry()},
                          {"a_normalization_error", pd.a_normalization_error()},
                          {"ImB_min_eigenvalue", spd}},
                     ch);
}

Json cmd_smatrix(const RunConfig& cfg) {
  const Curve c = cfg.curve.build();
  const PeriodData pd = periods_for(c, cfg);
  Checks ch(cfg.tol_scale);
  Json gate = bidiff_gate(c, pd, cfg, ch);
  const BidiffJets j = cone_point_jets(c, pd, cfg.series_order, cfg.branch_tag);
  const auto [SB, SS] = projective_connections(j);
  const SMatrixZero s = t_matrix_zero(j, pd);
  const DetRatios r = det_ratios(s, cfg.classification_tol);
  const KernelDiagnostics k = kernel_diagnostics(s, j, cfg.classification_tol);

  const double pscale = std::max(1.0, std::abs(j.S_Sch));
  const double routes = std::abs(j.S_Sch - j.S_Sch_route2) / pscale;
  const double transport = std::abs(j.S_Sch - j.S_Sch_transported) / pscale;
  const double vpar = j.v1.norm() / j.v0.norm();
  const double hpar = std::max({std::abs(j.h10), std::abs(j.h01), std::abs(j.hs10), std::abs(j.hs01)}) /
                      std::max(1.0, std::abs(j.h00));
  const double closed = std::abs(s.detT0 - s.detT0_closed) / std::max(std::abs(s.detT0_closed), s.det_scale);
  ch.at_most("Schiffer connection, two routes (relative)", routes, 1e-8);
  ch.at_most("Schwarzian transport zeta -> xi (relative)", transport, 1e-6);
  ch.at_most("parity |v'(0)|", vpar, 1e-8);
  ch.at_most("parity |H'(0,0)|", hpar, 1e-8);
  ch.at_most("normalized |detP0|", s.norm_detP0, 1e-6);
  ch.at_most("detT0 factorization (relative)", closed, 1e-6);
  ch.at_most("Im detT0 (normalized)", std::abs(std::imag(s.detT0)) / s.det_scale, 1e-8);
  ch.at_most("T0 conjugation blocks", s.conj_block_error, 1e-12);

  Json out = smatrix_json(s, r, k);
  out["projective_connections"] = Json{{"S_B", cj(SB)},
                                       {"S_Sch", cj(SS)},
                                       {"S_Sch_route2", cj(j.S_Sch_route2)},
                                       {"S_Sch_zeta", cj(j.S_Sch_zeta)},
                                       {"S_Sch_transported", cj(j.S_Sch_transported)},
                                       {"schwarzian_zeta_xi", cj(j.schwarzian_zeta_xi)}};
  out["parity"] = Json{{"v_prime_rel", vpar}, {"H_prime_rel", hpar}};
  out["bergman_PP"] = cj(j.B00);
  out["bidiff_gate"] = gate;
  return with_checks(out, ch);
}

Json cmd_cone(const RunConfig& cfg) {
  Checks ch(cfg.tol_scale);
  const double k = 27.0 / (2 * kPi * kPi);
  ch.at_most("c1 c2 = 27/(2 pi^2) (relative)", std::abs(cone_c1() * cone_c2() / k - 1), 1e-10);
  Json rows = Json::array();
  for (double l : cfg.lambdas) {
    const AsymptoticEntries a = asymptotic_entries(l);
    rows.push_back(Json{{"lambda", l},
                        {"s1", a.s1},
                        {"s2", a.s2},
                        {"detT_asym", a.detT},
                        {"detP_asym", a.detP},
                        {"dlogdetT", log_det_derivative(a)}});
    ch.at_most("detP_asym = s1 s2 at lambda=" + std::to_string(l), std::abs(a.s1 * a.s2 - a.detP) / a.detP, 1e-12);
    ch.at_most("detT_asym = detP_asym^2 at lambda=" + std::to_string(l),
               std::abs(a.detT - a.detP * a.detP) / a.detT, 1e-12);
  }
  return with_checks(Json{{"c1", cone_c1()},
                          {"c2", cone_c2()},
                          {"c1c2", cone_c1() * cone_c2()},
                          {"target", k},
                          {"entries", rows}},
                     ch);
}

Json cmd_green(const RunConfig& cfg) {
  const Curve c = cfg.curve.build();
  const PeriodData pd = periods_for(c, cfg);
  std::vector<PointSpec> specs = cfg.points.empty() ? default_green_points(c) : cfg.points;
  if (specs.size() < 2) throw Error(ErrorKind::InvalidConfig, "green needs at least two points");
  std::vector<SurfacePoint> pts;
  for (const auto& s : specs) pts.push_back(point_of(c, s));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t k = 0; k < i; ++k)
      if (std::abs(pts[i].lambda - pts[k].lambda) < 1e-9 && std::abs(pts[i].y - pts[k].y) < 1e-9 * std::abs(pts[i].y))
        throw Error(ErrorKind::CoincidentArguments, "green points must be distinct");

  GreenConfig gc;
  gc.quad = cfg.quad;
  const GreenFunction g(c, pd, gc);
  const double A = g.area();
  Checks ch(cfg.tol_scale);

  Json values = Json::array();
  double sym = 0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t k = i + 1; k < pts.size(); ++k) {
      const double a = g(pts[i], pts[k]), b = g(pts[k], pts[i]);
      sym = std::max(sym, std::abs(a - b));
      values.push_back(Json{{"i", i}, {"j", k}, {"G_xy", a}, {"G_yx", b}});
    }
  ch.at_most("symmetry max |G(x,y) - G(y,x)|", sym, 1e-2);

  const SurfacePoint& y0 = pts[0];
  const SurfaceGrid mgrid = metric_grid(c, cfg.cone_point, cfg.mean_grid);
  const double mean = green_mean(g, y0, mgrid);
  ch.at_most("mean zero |∫ G(x, y) dS(x)|", std::abs(mean), 1e-2);

  Json lap = Json::array();
  double lap_err = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double v = green_laplacian(g, pts[i], pts[(i + 1) % pts.size()]);
    lap_err = std::max(lap_err, std::abs(v * A + 1));
    lap.push_back(Json{{"point", i}, {"laplacian_over_density", v}, {"times_area", v * A}});
  }
  ch.at_most("Laplacian = -1/Area (max relative)", lap_err, 0.05);

  const double slope = log_coefficient(g, y0);
  ch.at_most("log coefficient 2 pi s - 1", std::abs(2 * kPi * slope - 1), 0.05);

  Json berg = Json::array();
  double berg_err = 0, berg_literal = 0;
  int done = 0;
  for (size_t i = 0; i < pts.size() && done < cfg.bergman_pairs; ++i)
    for (size_t k = i + 1; k < pts.size() && done < cfg.bergman_pairs; ++k, ++done) {
      const BergmanCheck b = bergman_consistency(g, pts[i], pts[k], cfg.bergman_step);
      berg_err = std::max(berg_err, std::abs(b.ratio() - 0.25) / 0.25);
      berg_literal = std::max(berg_literal, std::abs(b.ratio() + 0.25) / 0.25);
      berg.push_back(Json{{"i", i}, {"j", k}, {"mixed", cj(b.mixed)}, {"bergman", cj(b.bergman)}, {"ratio", cj(b.ratio())}});
    }
  ch.at_most("mixed derivative vs +B/4 (max relative)", berg_err, 0.05);

  const DistinguishedFrame fr = distinguished_frame(c, cfg.cone_point, cfg.series_order, cfg.branch_tag);
  const CoefficientMatch m = coefficient_matching(g, fr, y0, cfg.matching_radius);
  const char* names[3] = {"constant", "xi", "xi^2"};
  Json cm = Json::object();
  for (int q = 0; q < 3; ++q) {
    cm[names[q]] = Json{{"fitted", cj(m.fitted[q])}, {"predicted", cj(m.predicted[q])}, {"rel_error", m.rel_error[q]}};
    ch.at_most(std::string("coefficient matching, ") + names[q], m.rel_error[q], 0.1);
  }
  const cplx s1 = special_solution_zero(g, fr, 1, y0), s2 = special_solution_zero(g, fr, 2, y0);

  const RegLog rl = reg_log_limit(g, y0, metric_grid(c, cfg.cone_point, cfg.quad.surface_grid));
  const double factor = rl.value / m.fitted[0].real();
  ch.at_most("reg_log / fitted G(P,y) = 2 pi (relative)", std::abs(factor / (2 * kPi) - 1), 0.1);
  ch.at_most("reg_log reciprocity vs grid form (relative)", std::abs(rl.value_direct / rl.value - 1), 0.1);

  Json pj = Json::array();
  for (size_t i = 0; i < pts.size(); ++i) pj.push_back(Json{{"lambda", cj(pts[i].lambda)}, {"y", cj(pts[i].y)}});
  return with_checks(
      Json{{"area", A},
           {"energy", g.energy()},
           {"points", pj},
           {"values", values},
           {"mean_zero", mean},
           {"laplacian", lap},
           {"log_coefficient", slope},
           {"bergman",
            {{"pairs", berg},
             {"note", "measured mixed derivative equals +B/4 under G = (1/2pi) log|x-y| + O(1)"},
             {"rel_error_vs_minus_quarter", berg_literal}}},
           {"special_solutions", {{"G_1/xi", cj(s1)}, {"G_1/xi^2", cj(s2)}, {"G_1/xibar", cj(std::conj(s1))},
                                  {"G_1/xibar^2", cj(std::conj(s2))}}},
           {"coefficient_matching", {{"r0", m.r0}, {"coefficients", cm}}},
           {"reg_log", {{"value", rl.value}, {"value_grid", rl.value_direct}, {"G_P_y", rl.green_at_p},
                        {"fitted_constant", m.fitted[0].real()}, {"factor", factor}}}},
      ch);
}

Json cmd_z5_audit(const RunConfig& cfg) {
  if (cfg.curve.type != "z5") throw Error(ErrorKind::InvalidConfig, "z5-audit needs a z5 curve");
  if (cfg.cone_point != 0) throw Error(ErrorKind::InvalidConfig, "z5-audit needs the cone at the centre (cone_point 0)");
  const Curve c = cfg.curve.build();
  const PeriodData pd = periods_for(c, cfg);
  const BidiffJets j = cone_point_jets(c, pd, cfg.series_order, cfg.branch_tag);
  const SMatrixZero s = t_matrix_zero(j, pd);
  const KernelDiagnostics k = kernel_diagnostics(s, j, cfg.classification_tol);
  const DetRatios r = det_ratios(s, cfg.classification_tol);
  Checks ch(cfg.tol_scale);
  const double sc = s.piB;
  Json table = Json::object();
  auto entry = [&](const std::string& n, cplx v) {
    table[n] = std::abs(v) / sc;
    ch.at_most("|" + n + "| / piB", std::abs(v) / sc, 1e-6);
  };
  entry("S_Sch(0)", j.S_Sch);
  entry("T11", s.T0(0, 0));
  entry("T12", s.T0(0, 1));
  entry("T21", s.T0(1, 0));
  entry("T22", s.T0(1, 1));
  entry("T41", s.T0(3, 0));
  ch.at_most("normalized |detT0|", s.norm_detT0, 1e-6);

  auto e = c.branch_points();
  e[static_cast<size_t>(cfg.perturbed_point)] += cfg.perturbation;
  const Curve cp(e);
  const PeriodData pp = periods_for(cp, cfg);
  const BidiffJets jp = cone_point_jets(cp, pp, cfg.series_order, cfg.branch_tag);
  const SMatrixZero sp = t_matrix_zero(jp, pp);
  const KernelDiagnostics kp = kernel_diagnostics(sp, jp, cfg.classification_tol);
  ch.at_least("perturbed normalized |detT0|", sp.norm_detT0, 1e-3);

  return with_checks(Json{{"vanishing", table},
                          {"normalized_detT0", s.norm_detT0},
                          {"classification", k.classification},
                          {"smatrix", smatrix_json(s, r, k)},
                          {"perturbed",
                           {{"point", cfg.perturbed_point},
                            {"shift", cfg.perturbation},
                            {"normalized_detT0", sp.norm_detT0},
                            {"classification", kp.classification},
                            {"T22_over_piB", std::abs(sp.T0(1, 1)) / sp.piB}}}},
                     ch);
}

Json run_command(const std::string& command, const RunConfig& cfg) {
  Json result;
  if (command == "periods")
    result = cmd_periods(cfg);
  else if (command == "smatrix")
    result = cmd_smatrix(cfg);
  else if (command == "cone")
    result = cmd_cone(cfg);
  else if (command == "green")
    result = cmd_green(cfg);
  else if (command == "z5-audit")
    result = cmd_z5_audit(cfg);
  else
    throw Error(ErrorKind::InvalidConfig, "unknown command '" + command + "'");
  Json checks = result["checks"];
  result.erase("checks");
  bool pass = true;
  for (const auto& c : checks) pass = pass && c["pass"].get<bool>();
  return Json{{"schema", kReportSchema},
              {"tool", {{"name", "cone-spectra"}, {"version", kToolVersion}}},
              {"command", command},
              {"config", config_to_json(cfg)},
              {"result", result},
              {"checks", checks},
              {"status", pass ? "pass" : "fail"}};
}

Json error_report(const std::string& command, const Error& e) {
  return Json{{"schema", kReportSchema},
              {"tool", {{"name", "cone-spectra"}, {"version", kToolVersion}}},
              {"command", command},
              {"error", {{"kind", error_name(e.kind())}, {"message", e.what()}, {"exit_code", exit_code(e.kind())}}},
              {"status", "error"}};
}

std::string render(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace cone_spectra
