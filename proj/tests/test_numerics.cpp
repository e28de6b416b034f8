#include "doctest.h"

#include <random>

#include "cone_spectra/numerics.hpp"

using namespace cone_spectra;

namespace {

Series random_series(std::mt19937& rng, int n, bool zero_constant) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Series s(n);
  for (int k = 0; k <= n; ++k) s[k] = cplx(u(rng), u(rng)) / double(1 + k);
  if (zero_constant) {
    s[0] = 0.0;
    const double m = 0.5 + 0.75 * (u(rng) + 1.0);
    s[1] = std::polar(m, kPi * u(rng));
  }
  return s;
}

// second-order central difference of f'' etc. is avoided: derivatives of a
// polynomial are evaluated exactly from its coefficients
cplx deriv_at0(const std::vector<double>& poly, int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return k < int(poly.size()) ? poly[k] * f : 0.0;
}

}  // namespace

TEST_CASE("path quadrature examples") {
  QuadratureConfig cfg;
  auto one = integrate_interval([](double) { return 1.0; }, 0.0, 1.0, cfg);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<cplx> poly;
  for (int k = 0; k <= 12; ++k) poly.push_back(std::polar(1.0, 2 * kPi * k / 12));
  auto loop = integrate_path([](cplx z) { return 1.0 / z; }, poly, cfg);
  CHECK(std::abs(loop.value - cplx(0, 2 * kPi)) < 1e-12);

  QuadratureConfig loose = cfg;
  loose.rel_tol = 1e-7;
  auto beta = integrate_interval([](double t) { return 1.0 / std::sqrt(t * (1 - t)); }, 0.0, 1.0, loose);
  CHECK(std::abs(beta.value - kPi) < 1e-6);
}

TEST_CASE("quadrature refinement stays within the previous error estimate") {
  auto f = [](double t) { return cplx(std::exp(-t) * std::cos(20 * t), 1.0 / (1.0 + 25 * t * t)); };
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-6;
  auto prev = integrate_interval(f, -1.0, 1.0, cfg);
  for (int i = 0; i < 12; ++i) {
    cfg.rel_tol *= 0.5;
    auto cur = integrate_interval(f, -1.0, 1.0, cfg);
    CHECK(std::abs(cur.value - prev.value) <= prev.error + 1e-15);
    prev = cur;
  }
}

TEST_CASE("non-convergence is reported") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 5;
  CHECK_THROWS_AS(integrate_interval([](double t) { return std::log(std::abs(t - 0.3)); }, 0.0, 1.0, cfg),
                  Error);
}

TEST_CASE("gamma") {
  CHECK(cone_spectra::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(cone_spectra::gamma(0.5) / std::sqrt(kPi) - 1) < 1e-14);
  CHECK(std::abs(cone_spectra::gamma(1.0 / 3) * cone_spectra::gamma(2.0 / 3) / (2 * kPi / std::sqrt(3.0)) - 1) < 1e-13);
  CHECK_THROWS_AS(cone_spectra::gamma(-1.0), Error);
}

TEST_CASE("series arithmetic") {
  std::mt19937 rng(7);
  const int N = 16;
  for (int trial = 0; trial < 20; ++trial) {
    Series f = random_series(rng, N, true);
    Series g = f.reversion();
    Series id = f.compose(g);
    Series id2 = g.compose(f);
    for (int k = 0; k <= N; ++k) {
      CHECK(std::abs(id[k] - (k == 1 ? 1.0 : 0.0)) < 1e-10);
      CHECK(std::abs(id2[k] - (k == 1 ? 1.0 : 0.0)) < 1e-10);
    }
    Series a = random_series(rng, N, false);
    a[0] = 1.0 + 0.3 * a[0];
    Series q = (a * f) / a;
    for (int k = 0; k <= N; ++k) CHECK(std::abs(q[k] - f[k]) < 1e-11);
    Series r = a.root(3, std::pow(a[0], 1.0 / 3));
    Series r3 = r * r * r;
    for (int k = 0; k <= N; ++k) CHECK(std::abs(r3[k] - a[k]) < 1e-11);
    Series back = a.integral().derivative();
    for (int k = 0; k <= N; ++k) CHECK(std::abs(back[k] - a[k]) < 1e-14);
  }
  Series tiny = Series::constant(1e-14, 4);
  CHECK_THROWS_AS(tiny.reciprocal(), Error);
}

TEST_CASE("schwarzian") {
  const int N = 16;
  CHECK(std::abs(schwarzian(Series::identity(N))[0]) < 1e-15);
  // Möbius (a t + b)/(c t + d) with f(0) shifted to 0
  cplx a = {1.2, 0.3}, b = {0.0, 0.0}, c = {0.4, -0.2}, d = {1.0, 0.1};
  Series num = Series::identity(N) * a + Series::constant(b, N);
  Series den = Series::identity(N) * c + Series::constant(d, N);
  Series mob = num / den;
  Series sm = schwarzian(mob);
  for (int k = 0; k <= sm.order(); ++k) CHECK(std::abs(sm[k]) < 1e-10);

  Series cubic = Series::identity(N);
  cubic[3] = 1.0;
  std::vector<double> p{0, 1, 0, 1};
  cplx direct = deriv_at0(p, 3) / deriv_at0(p, 1) - 1.5 * std::pow(deriv_at0(p, 2) / deriv_at0(p, 1), 2);
  CHECK(std::abs(schwarzian(cubic)[0] - 6.0) < 1e-14);
  CHECK(std::abs(direct - 6.0) < 1e-14);

  Series flat(N);
  flat[2] = 1.0;
  CHECK_THROWS_AS(schwarzian(flat), Error);
}

TEST_CASE("schwarzian cocycle") {
  std::mt19937 rng(11);
  const int N = 16;
  for (int trial = 0; trial < 10; ++trial) {
    Series f = random_series(rng, N, true), g = random_series(rng, N, true);
    Series lhs = schwarzian(f.compose(g));
    Series gp = g.derivative();
    Series rhs = schwarzian(f).compose(g) * gp * gp + schwarzian(g);
    for (int k = 0; k <= N - 3; ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-8 * (1 + std::abs(lhs[k])));
  }
}

TEST_CASE("bivariate series") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const int N = 12;
  BiSeries r(N - 1);
  for (int a = 0; a < N; ++a)
    for (int b = 0; a + b < N; ++b) r.at(a, b) = cplx(u(rng), u(rng));
  BiSeries diff(1), sum(1);
  diff.at(1, 0) = 1.0;
  diff.at(0, 1) = -1.0;
  sum.at(1, 0) = 1.0;
  sum.at(0, 1) = 1.0;
  // promote r to order N with zero top layer, multiply, then divide back
  BiSeries rp = r.truncated(N);
  BiSeries dp = diff.truncated(N), sp = sum.truncated(N);
  BiSeries q1 = (rp * dp).div_by_difference();
  BiSeries q2 = (rp * sp).div_by_sum();
  for (int a = 0; a < N; ++a)
    for (int b = 0; a + b < N; ++b) {
      CHECK(std::abs(q1(a, b) - r(a, b)) < 1e-12);
      CHECK(std::abs(q2(a, b) - r(a, b)) < 1e-12);
    }
  const cplx x{0.11, -0.05}, y{-0.07, 0.09};
  cplx direct = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; a + b < N; ++b) direct += r(a, b) * std::pow(x, a) * std::pow(y, b);
  CHECK(std::abs(r.eval(x, y) - direct) < 1e-13);
  BiSeries one = rp * rp.reciprocal();
  CHECK(std::abs(one(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(one(3, 2)) < 1e-9);
}

TEST_CASE("surface quadrature: exterior weight and symmetry") {
  std::vector<cplx> pts;
  for (int k = 0; k < 6; ++k) pts.push_back(std::polar(0.5, 2 * kPi * k / 6 + 0.1));
  auto w = [](cplx z) { return std::abs(z) >= 1.0 ? std::pow(std::abs(z), -4.0) : 0.0; };
  SurfaceGrid grid(pts, w, SurfaceGridConfig{24, 32, 0.0}, {1.0});
  double v = grid.integrate([](cplx, int) { return 1.0; });
  CHECK(std::abs(v - 2 * kPi) < 1e-10);
  double anti = grid.integrate([](cplx z, int s) { return s * std::cos(z.real()); });
  CHECK(std::abs(anti) < 1e-15);
}

TEST_CASE("surface quadrature: area of the Z5 curve against a polar oracle") {
  std::vector<cplx> pts{0.0};
  for (int k = 0; k < 5; ++k) pts.push_back(std::polar(1.0, 2 * kPi * k / 5));
  auto w = [](cplx z) { return std::abs(z) / std::abs(std::pow(z, 5) - 1.0); };
  SurfaceGrid grid(pts, w, SurfaceGridConfig{24, 32, 0.0});
  double area = grid.integrate([](cplx, int) { return 1.0; });
  SurfaceGrid fine(pts, w, SurfaceGridConfig{48, 64, 0.0});
  double area2 = fine.integrate([](cplx, int) { return 1.0; });

  // oracle: 20 ∫_0^{π/5} dθ ∫_0^∞ r^2 / |r^5 e^{5iθ} - 1| dr
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  auto inner = [&](double th) {
    auto g = [&](double r) { return r * r / std::abs(std::pow(cplx(std::polar(r, th)), 5) - 1.0); };
    double s = integrate_interval(g, 0.0, 1.0, cfg).value + integrate_interval(g, 1.0, 2.0, cfg).value;
    s += integrate_interval([&](double t) { return g(2.0 / t) * 2.0 / (t * t); }, 0.0, 1.0, cfg).value;
    return s;
  };
  QuadratureConfig outer = cfg;
  outer.rel_tol = 1e-10;
  double oracle = 20.0 * integrate_interval(inner, 0.0, kPi / 5, outer).value;
  CHECK(area > 0);
  CHECK(std::abs(area2 / oracle - 1) < 1e-7);
  CHECK(std::abs(area / oracle - 1) < 1e-4);
  MESSAGE("area " << area << " fine " << area2 << " oracle " << oracle);
}
