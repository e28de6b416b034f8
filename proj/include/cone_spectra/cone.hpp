#pragma once

#include "cone_spectra/numerics.hpp"

namespace cone_spectra {

/// Modified Bessel functions of order ν ∈ (0,1) at x > 0.
double bessel_k(double nu, double x);
double bessel_i(double nu, double x);

/// Mellin-transformed Green kernel on the cone of angle 2πB:
///   Γ = (π/μ) cosh(μ(πB - d)) / sinh(μπB),  d = |ω1 - ω2| (mod 2πB).
cplx cone_green_kernel(double B, cplx mu, double w1, double w2);

/// Φ_ν = π^{-1} 2^{-ν} Γ(1-ν) sin(πν) (√-λ)^ν K_ν(√-λ r) e^{-iνφ}
cplx phi_model(double nu, double lambda, double r, double phi);

/// Constants of the displayed small-ζ expansion of Φ_{1/3}, Φ_{2/3}.
double cone_c1();  // 2^{1/3}√3 Γ(2/3) / (π Γ(4/3))
double cone_c2();  // 2^{-1/3}√3 Γ(1/3) / (π Γ(5/3))
/// Ratio of the ζ̄^k to the ζ^{-k} coefficient implied by the K_ν series,
/// divided by -(-λ)^ν: 2^{-2ν} Γ(1-ν)/Γ(1+ν).
double bessel_ratio_constant(double nu);

/// Coefficients a, b of Φ_ν ≈ a ζ^{-k} + b ζ̄^{k} (k = 3ν), from the angular
/// projection on the circles r0, 2 r0 and 4 r0.
struct PhiFit {
  cplx leading = 0;
  cplx zbar = 0;
  cplx ratio() const { return zbar / leading; }
};
PhiFit phi_fit(double nu, double lambda, double r0, int nphi = 96);

struct AsymptoticEntries {
  double lambda = 0;
  double s1 = 0, s2 = 0;
  double detT = 0, detP = 0;
  Eigen::Matrix4d T;   // nonzeros (3,1), (4,2), (1,3), (2,4) (1-based)
  Eigen::Matrix4d dT;  // dT/dλ
};
AsymptoticEntries asymptotic_entries(double lambda);

/// -Tr(T^{-1} T') of the sparse asymptotic T
double log_det_derivative(const AsymptoticEntries& a);

}  // namespace cone_spectra
