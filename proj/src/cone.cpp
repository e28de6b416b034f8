#include "cone_spectra/cone.hpp"

#include <cmath>

namespace cone_spectra {

namespace {

void check_order(double nu, double x) {
  if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorKind::DomainError, "Bessel order must lie in (0,1)");
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "Bessel argument must be positive");
}

}  // namespace

double bessel_k(double nu, double x) {
  check_order(nu, x);
  return std::cyl_bessel_k(nu, x);
}

double bessel_i(double nu, double x) {
  check_order(nu, x);
  return std::cyl_bessel_i(nu, x);
}

cplx cone_green_kernel(double B, cplx mu, double w1, double w2) {
  if (!(B > 0)) throw Error(ErrorKind::DomainError, "cone angle parameter B must be positive");
  const double period = 2 * kPi * B;
  double d = std::fmod(std::abs(w1 - w2), period);
  // Γ is even in μ; work with Re μ >= 0 so the exponentials decay
  if (std::real(mu) < 0) mu = -mu;
  const cplx q = std::exp(-period * mu);
  if (std::abs(1.0 - q) < 1e-12) throw Error(ErrorKind::PoleEvaluation, "Mellin variable at a pole of the cone kernel");
  return (kPi / mu) * (std::exp(-mu * d) + std::exp(-mu * (period - d))) / (1.0 - q);
}

cplx phi_model(double nu, double lambda, double r, double phi) {
  if (!(lambda < 0)) throw Error(ErrorKind::DomainError, "model solutions need λ < 0");
  const double k = std::sqrt(-lambda);
  const double pref = std::pow(2.0, -nu) * gamma(1 - nu) * std::sin(kPi * nu) / kPi * std::pow(k, nu);
  return pref * bessel_k(nu, k * r) * std::exp(cplx(0, -nu * phi));
}

double cone_c1() { return std::cbrt(2.0) * std::sqrt(3.0) * gamma(2.0 / 3) / (kPi * gamma(4.0 / 3)); }
double cone_c2() { return std::sqrt(3.0) * gamma(1.0 / 3) / (std::cbrt(2.0) * kPi * gamma(5.0 / 3)); }

double bessel_ratio_constant(double nu) { return std::pow(2.0, -2 * nu) * gamma(1 - nu) / gamma(1 + nu); }

PhiFit phi_fit(double nu, double lambda, double r0, int nphi) {
  // angular projection onto e^{-iνφ}, φ ∈ [0, 6π)
  auto project = [&](double r) {
    cplx s = 0;
    for (int m = 0; m < nphi; ++m) {
      const double phi = 6 * kPi * m / nphi;
      s += phi_model(nu, lambda, r, phi) * std::exp(cplx(0, nu * phi));
    }
    return s / static_cast<double>(nphi);
  };
  // p(r) = a r^{-ν} + b r^{ν} + c r^{2-ν} + O(r^{2+ν}) on r0, 2 r0, 4 r0
  Eigen::Matrix3cd A;
  Eigen::Vector3cd rhs;
  for (int i = 0; i < 3; ++i) {
    const double r = r0 * std::pow(2.0, i);
    A(i, 0) = std::pow(r, -nu);
    A(i, 1) = std::pow(r, nu);
    A(i, 2) = std::pow(r, 2 - nu);
    rhs(i) = project(r);
  }
  const Eigen::Vector3cd x = A.fullPivLu().solve(rhs);
  PhiFit f;
  f.leading = x(0);
  f.zbar = x(1);
  return f;
}

AsymptoticEntries asymptotic_entries(double lambda) {
  if (!(lambda <= -1.0)) throw Error(ErrorKind::DomainError, "asymptotic entries need λ <= -1");
  AsymptoticEntries a;
  a.lambda = lambda;
  const double m = -lambda;
  a.s1 = -cone_c1() * std::cbrt(m);
  a.s2 = -cone_c2() * std::cbrt(m * m);
  const double k = 27.0 / (2 * kPi * kPi);
  a.detT = k * k * lambda * lambda;
  a.detP = -k * lambda;
  // d s1/dλ = s1/(3λ), d s2/dλ = 2 s2/(3λ)
  a.T.setZero();
  a.dT.setZero();
  a.T(2, 0) = a.T(0, 2) = a.s1;
  a.T(3, 1) = a.T(1, 3) = a.s2;
  a.dT(2, 0) = a.dT(0, 2) = a.s1 / (3 * lambda);
  a.dT(3, 1) = a.dT(1, 3) = 2 * a.s2 / (3 * lambda);
  return a;
}

double log_det_derivative(const AsymptoticEntries& a) { return -(a.T.inverse() * a.dT).trace(); }

}  // namespace cone_spectra
