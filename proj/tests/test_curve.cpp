#include "doctest.h"

#include <random>

#include "cone_spectra/curve.hpp"

using namespace cone_spectra;

namespace {

std::vector<Curve> test_curves() {
  std::vector<Curve> cs{Curve::z5(0.0, 1.0)};
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  for (int t = 0; t < 5; ++t) {
    auto e = Curve::z5(0.0, 1.0).branch_points();
    for (auto& x : e) x += cplx(u(rng), u(rng));
    cs.emplace_back(e);
  }
  return cs;
}

std::vector<cplx> circle(cplx c, double r, int n = 64) {
  std::vector<cplx> p;
  for (int k = 0; k <= n; ++k) p.push_back(c + std::polar(r, 2 * kPi * k / n));
  return p;
}

}  // namespace

TEST_CASE("make_curve") {
  Curve z = Curve::z5(0.0, 1.0);
  CHECK(std::abs(z.branch_point(0)) < 1e-15);
  CHECK(std::abs(z.branch_point(1) - 1.0) < 1e-15);
  for (int k = 2; k <= 5; ++k) CHECK(std::abs(z.branch_point(k) - std::polar(1.0, 2 * kPi * (k - 1) / 5)) < 1e-15);
  CHECK(std::abs(z.base_y() * z.base_y() / z.f(z.base()) - 1.0) < 1e-12);

  auto e = z.branch_points();
  e[5] = e[2];
  CHECK_THROWS_AS(Curve{e}, Error);
  try {
    Curve bad(e);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::DuplicateBranchPoints);
  }
  try {
    Curve bad(z.branch_points(), z.branch_point(3));
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::BaseOnBranchPoint);
  }
}

TEST_CASE("monodromy of the continuation") {
  Curve z = Curve::z5(0.0, 1.0);
  const cplx b = z.base();
  auto loop_around = [&](std::vector<cplx> loop) {
    std::vector<cplx> path{b, loop.front()};
    path.insert(path.end(), loop.begin() + 1, loop.end());
    path.push_back(b);
    return z.continue_y(path);
  };
  // no branch point
  CHECK(std::abs(loop_around(circle(cplx(0.5, 1.5), 0.3)) - z.base_y()) < 1e-12 * std::abs(z.base_y()));
  // one branch point (λ = 1)
  CHECK(std::abs(loop_around(circle(1.0, 0.2)) + z.base_y()) < 1e-12 * std::abs(z.base_y()));
  // two branch points (0 and 1)
  CHECK(std::abs(loop_around(circle(0.5, 0.62, 128)) - z.base_y()) < 1e-12 * std::abs(z.base_y()));
  // all six
  CHECK(std::abs(loop_around(circle(0.0, 1.5, 128)) - z.base_y()) < 1e-12 * std::abs(z.base_y()));
  CHECK_THROWS_AS(z.continue_y({b, 1.0, 2.0}), Error);

  // surface paths reach the requested sheet
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  for (int t = 0; t < 40; ++t) {
    SurfacePoint p = z.point(cplx(u(rng), u(rng)), t % 2 ? 1 : -1);
    SurfacePoint q = z.point(cplx(u(rng), u(rng)), t % 3 ? 1 : -1);
    auto path = z.surface_path(p, q);
    CHECK(z.path_clearance(path) > 0.0);
    const cplx y = z.continue_polyline(path, p.y);
    CHECK(std::abs(y - q.y) < 1e-10 * std::abs(q.y));
  }
}

TEST_CASE("period data invariants on the test corpus") {
  QuadratureConfig cfg;
  for (const auto& c : test_curves()) {
    PeriodData pd = period_data(c, 0, cfg);
    CHECK(pd.asymmetry() < 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pd.ImB);
    CHECK(es.eigenvalues().minCoeff() > 0);
    CHECK(pd.a_normalization_error() < 1e-8);
    CHECK(pd.area > 0);
    CHECK(std::abs(pd.area / pd.area_bilinear - 1) < 1e-4);
  }
}

TEST_CASE("Z5 period matrix and area regression") {
  Curve z = Curve::z5(0.0, 1.0);
  QuadratureConfig cfg;
  PeriodData pd = period_data(z, 0, cfg);
  QuadratureConfig tight = cfg;
  tight.rel_tol = 1e-14;
  tight.abs_tol = 1e-16;
  tight.surface_grid = {48, 64, 0.0};
  PeriodData fine = period_data(z, 0, tight);
  CHECK((pd.Bmat - fine.Bmat).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(pd.area - fine.area) < 1e-4 * fine.area);
  CHECK(std::abs(pd.area_bilinear - fine.area_bilinear) < 1e-7 * fine.area);
  CHECK(std::abs(fine.area - fine.area_bilinear) < 1e-7 * fine.area);
  // alternative pairing: different basis, same area and symmetric Bmat
  PeriodData alt = period_data(z, 0, cfg, 1);
  CHECK(alt.cycles.order() != pd.cycles.order());
  CHECK(alt.asymmetry() < 1e-8);
  CHECK(std::abs(alt.area_bilinear - pd.area_bilinear) < 1e-7 * pd.area);
  MESSAGE("Z5 Bmat = " << pd.Bmat << "  area " << pd.area << "  bilinear " << pd.area_bilinear);
}

TEST_CASE("area stable under grid doubling") {
  QuadratureConfig cfg;
  QuadratureConfig dbl = cfg;
  dbl.surface_grid.radial *= 2;
  dbl.surface_grid.angular *= 2;
  for (const auto& c : test_curves()) {
    const double a1 = metric_grid(c, 0, cfg.surface_grid).integrate([](cplx, int) { return 1.0; });
    const double a2 = metric_grid(c, 0, dbl.surface_grid).integrate([](cplx, int) { return 1.0; });
    CHECK(std::abs(a1 / a2 - 1) < 1e-4);
  }
}

TEST_CASE("singular differential and local parity") {
  Curve z = Curve::z5(0.0, 1.0);
  const int N = 16;
  LocalExpansion le = local_expansion(z, 0, N);
  // ω/dζ = c (ζ^2 + O(ζ^12)) on the Z5 curve
  CHECK(std::abs(le.omega[2]) > 0.1);
  for (int k = 3; k < 12; ++k) CHECK(std::abs(le.omega[k]) < 1e-14);
  CHECK(std::abs(le.omega[12]) > 1e-3);
  // y = ζ s(ζ) reproduces f
  const cplx zeta{0.05, 0.03};
  const cplx lam = le.lambda.eval(zeta);
  CHECK(std::abs(std::pow(zeta * le.s.eval(zeta), 2) - z.f(lam)) < 1e-13);

  QuadratureConfig cfg;
  for (const auto& c : test_curves()) {
    PeriodData pd = period_data(c, 0, cfg);
    for (int p = 0; p < 6; ++p) {
      LocalExpansion l = local_expansion(c, p, N);
      for (int a = 0; a < 2; ++a) {
        Series v = pd.C(a, 0) * l.omega1 + pd.C(a, 1) * l.omega2;
        double scale = 0;
        for (int k = 0; k <= N; ++k) scale = std::max(scale, std::abs(v[k]));
        for (int k = 1; k <= N; k += 2) CHECK(std::abs(v[k]) <= 1e-8 * scale);
      }
      CHECK(std::abs(l.omega[2]) > 1e-6);
      CHECK(std::abs(l.omega[3]) < 1e-14);
    }
    SurfacePoint q = c.point(cplx(0.3, 0.4), 1);
    CHECK(std::abs(singular_differential(c, 0, q) + singular_differential(c, 0, c.opposite(q))) < 1e-15);
  }
  CHECK_THROWS_AS(singular_differential(z, 7, z.point(0.5)), Error);
}
