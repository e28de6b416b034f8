#include "doctest.h"

#include "cone_spectra/cone.hpp"

using namespace cone_spectra;

TEST_CASE("Bessel functions") {
  // half-integer closed forms
  for (double x : {1e-6, 1e-3, 0.1, 1.0, 7.5, 30.0, 50.0}) {
    const double k = std::sqrt(kPi / (2 * x)) * std::exp(-x);
    CHECK(std::abs(bessel_k(0.5, x) / k - 1) < 1e-10);
    const double i = std::sqrt(2 / (kPi * x)) * std::sinh(x);
    CHECK(std::abs(bessel_i(0.5, x) / i - 1) < 1e-10);
  }
  CHECK(std::abs(bessel_k(0.5, 1.0) - 0.4610685) < 1e-7);
  // Wronskian I K' - I' K = -1/x, derivatives by central differences
  for (double nu : {1.0 / 3, 2.0 / 3}) {
    const double x = 2.0, h = 1e-4;
    auto d = [&](auto f) { return (f(nu, x + h) - f(nu, x - h)) / (2 * h); };
    const double w = bessel_i(nu, x) * d(bessel_k) - d(bessel_i) * bessel_k(nu, x);
    CHECK(std::abs(w + 1 / x) < 1e-7);
  }
  CHECK_THROWS_AS(bessel_k(1.5, 1.0), Error);
  CHECK_THROWS_AS(bessel_k(0.5, 0.0), Error);
}

TEST_CASE("small-argument expansion of K_nu") {
  for (double nu : {1.0 / 3, 2.0 / 3}) {
    auto rem = [&](double y) {
      const double lead = std::pow(y, -nu) / (std::pow(2.0, -nu) * cone_spectra::gamma(1 - nu)) -
                          std::pow(y, nu) / (std::pow(2.0, nu) * cone_spectra::gamma(1 + nu));
      return std::abs(bessel_k(nu, y) * 2 * std::sin(nu * kPi) / kPi - lead);
    };
    const double y = 1e-3;
    CHECK(rem(y) < 10 * std::pow(y, 2 - nu));
    const double slope = std::log(rem(y) / rem(y / 2)) / std::log(2.0);
    CHECK(std::abs(slope - (2 - nu)) < 0.05);
  }
}

TEST_CASE("cone Green kernel") {
  CHECK(std::abs(cone_green_kernel(1.0, 1.0, 0.3, 0.3) - kPi * std::cosh(kPi) / std::sinh(kPi)) < 1e-12);
  CHECK(std::abs(cone_green_kernel(1.0, 1.0, 0.3, 0.3) - 3.1533480949) < 1e-9);
  const double B = 3.0;
  const cplx mu{0.7, 0.4};
  // symmetric and periodic
  CHECK(std::abs(cone_green_kernel(B, mu, 1.0, 4.0) - cone_green_kernel(B, mu, 4.0, 1.0)) < 1e-14);
  CHECK(std::abs(cone_green_kernel(B, mu, 1.0, 4.0) - cone_green_kernel(B, mu, 1.0, 4.0 + 2 * kPi * B)) < 1e-12);
  CHECK(std::abs(cone_green_kernel(B, mu, 1.0, 4.0) - cone_green_kernel(B, -mu, 1.0, 4.0)) < 1e-14);
  // (-∂² + μ²) Γ = 0 away from the diagonal
  const double w1 = 2.0, h = 1e-3;
  for (double w2 : {3.0, 7.0, 15.0}) {
    auto g = [&](double w) { return cone_green_kernel(B, mu, w1, w); };
    const cplx d2 = (g(w2 + h) - 2.0 * g(w2) + g(w2 - h)) / (h * h);
    CHECK(std::abs(-d2 + mu * mu * g(w2)) < 1e-6);
  }
  // jump of the derivative across the diagonal
  for (cplx m : {cplx(1.0), mu, cplx(0.2, -1.3)}) {
    auto g = [&](double w) { return cone_green_kernel(B, m, w1, w); };
    const double e = 1e-5;
    const cplx right = (-3.0 * g(w1) + 4.0 * g(w1 + e) - g(w1 + 2 * e)) / (2 * e);
    const cplx left = (3.0 * g(w1) - 4.0 * g(w1 - e) + g(w1 - 2 * e)) / (2 * e);
    CHECK(std::abs(right - left + 2 * kPi) < 1e-6);
  }
  // poles at μ ∈ (i/B)Z
  for (int n : {1, 2, -3}) {
    const cplx pole = kI * static_cast<double>(n) / B;
    CHECK(std::abs(cone_green_kernel(B, pole + 1e-8, 0.5, 1.5)) > 1e6);
    CHECK_THROWS_AS(cone_green_kernel(B, pole, 0.5, 1.5), Error);
    try {
      cone_green_kernel(B, pole, 0.5, 1.5);
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::PoleEvaluation);
    }
  }
  // analytic on a line Re μ = 0.3: finite and smooth
  for (int t = -20; t <= 20; ++t) {
    const cplx m{0.3, 0.25 * t};
    const cplx a = cone_green_kernel(B, m, 0.5, 2.0);
    const cplx b = cone_green_kernel(B, m + cplx(0, 1e-6), 0.5, 2.0);
    CHECK(std::isfinite(std::abs(a)));
    CHECK(std::abs(a - b) < 1e-4 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("model solutions") {
  // high-precision reference value of the displayed constant
  CHECK(std::abs(cone_c1() - 1.0533412298115745) < 1e-12);
  // gamma recurrences: c1 c2 = 27/(2π²)
  CHECK(std::abs(cone_c1() * cone_c2() - 27 / (2 * kPi * kPi)) < 1e-10);
  // exponential decay
  CHECK(std::abs(phi_model(1.0 / 3, -4.0, 20.0, 0.3)) < 1e-15);
  // expansion against the K_ν series: leading 1/2, ζ̄ ratio -2^{-2ν}Γ(1-ν)/Γ(1+ν)(-λ)^ν
  for (double nu : {1.0 / 3, 2.0 / 3}) {
    PhiFit f = phi_fit(nu, -4.0, 1e-6);
    CHECK(std::abs(f.leading - 0.5) < 1e-8);
    const double expect = -bessel_ratio_constant(nu) * std::pow(4.0, nu);
    CHECK(std::abs(f.ratio() / expect - 1.0) < 1e-6);
  }
  // the displayed constant differs from the Bessel series by the factor 2√3/π
  const double r = cone_c1() / bessel_ratio_constant(1.0 / 3);
  CHECK(std::abs(r - 2 * std::sqrt(3.0) / kPi) < 1e-12);
  CHECK(std::abs(cone_c2() / bessel_ratio_constant(2.0 / 3) - 2 * std::sqrt(3.0) / kPi) < 1e-12);
  CHECK_THROWS_AS(phi_model(1.0 / 3, 1.0, 0.1, 0.0), Error);
}

TEST_CASE("asymptotic entries") {
  const double k = 27 / (2 * kPi * kPi);
  CHECK(std::abs(k - 1.367836) < 1e-6);
  AsymptoticEntries a = asymptotic_entries(-1.0);
  CHECK(std::abs(a.detP - k) < 1e-12);
  AsymptoticEntries b = asymptotic_entries(-8.0);
  CHECK(std::abs(b.s1 + 2 * cone_c1()) < 1e-12);
  for (double l : {-1.0, -10.0, -100.0, -1e4}) {
    AsymptoticEntries e = asymptotic_entries(l);
    CHECK(e.s1 < 0);
    CHECK(e.s2 < 0);
    CHECK(std::abs(e.s1 * e.s2 / l + k) < 1e-10 * k);
    CHECK(std::abs(e.detP - e.s1 * e.s2) < 1e-10 * e.detP);
    CHECK(std::abs(e.T.determinant() / e.detT - 1) < 1e-10);
    CHECK(std::abs(e.detT - std::pow(e.s1 * e.s2, 2)) < 1e-10 * e.detT);
    CHECK(std::abs(log_det_derivative(e) + 2 / l) < 1e-12 * std::abs(2 / l));
  }
  CHECK_THROWS_AS(asymptotic_entries(-0.5), Error);
}
