#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cone_spectra/bidiff.hpp"

namespace cone_spectra {

/// 2π²/27
inline constexpr double kComparisonFactor = 2.0 * kPi * kPi / 27.0;

/// Coefficient vector X = (𝔏, ℌ₁, ℌ₂, 𝔄₁, 𝔄₂, 𝔠, 𝔥₁, 𝔥₂, 𝔞₁, 𝔞₂).
struct ExpansionCoefficients {
  enum Index { L = 0, H1, H2, A1, A2, c, h1, h2, a1, a2 };
  std::array<cplx, 10> x{};

  static ExpansionCoefficients unit(Index i) {
    ExpansionCoefficients e;
    e.x[i] = 1.0;
    return e;
  }
};

/// X(a) J X(b)^T with J = [[0, -I5], [I5, 0]]
cplx symplectic_pairing(const ExpansionCoefficients& a, const ExpansionCoefficients& b);

struct SMatrixZero {
  Eigen::Matrix4cd T0;  // rows ζ, ζ², ζ̄, ζ̄²; columns 1/ζ, 1/ζ², 1/ζ̄, 1/ζ̄²
  Eigen::Matrix2cd P0;
  cplx detT0 = 0, detP0 = 0;
  cplx detT0_closed = 0;  // |T22|^2 (|T11|^2 - π^2 B^2)
  double piB = 0;         // π B(P, P̄)
  double det_scale = 0;   // (πB)^2 max(|T22|, πB/2)^2
  double norm_detT0 = 0, norm_detP0 = 0;
  double conj_block_error = 0;
};

SMatrixZero t_matrix_zero(const BidiffJets& j, const PeriodData& pd);

struct DetRatios {
  cplx ratio_sing = 0, ratio_hol = 0;
  bool sing_degenerate = false, hol_degenerate = false;
  std::string note;
};
DetRatios det_ratios(const SMatrixZero& s, double tol = 1e-6);

struct KernelDiagnostics {
  bool weierstrass = false;  // dim Ker Δ_hol = 2
  bool sing_degenerate = false;
  bool dimension3_signature = false;
  double row2 = 0, row4 = 0;  // max-norms of rows 2 and 4 of T0, relative to πB
  std::string classification;
  std::string friedrichs = "dim Ker Δ_F = 1";
  std::vector<std::pair<std::string, double>> audit;
};
KernelDiagnostics kernel_diagnostics(const SMatrixZero& s, const BidiffJets& j, double tol = 1e-6);

/// Jets in the distinguished frame at branch point p (default: the cone point of `pd`).
BidiffJets cone_point_jets(const Curve& c, const PeriodData& pd, int order = 16, int branch_tag = 0, int p = -1);

}  // namespace cone_spectra
