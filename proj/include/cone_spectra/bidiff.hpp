#pragma once

#include "cone_spectra/curve.hpp"

namespace cone_spectra {

/// Distinguished parameter ξ at a branch point: ξ^3 = ∫_0^ζ ω.
struct DistinguishedFrame {
  int p = -1;
  int branch_tag = 0;  // ξ multiplied by e^{2πi·tag/3}
  LocalExpansion local;
  Series xi_of_zeta;
  Series zeta_of_xi;
  Series omega_integral;  // ∫_0^ζ ω as a series in ζ
};

DistinguishedFrame distinguished_frame(const Curve& c, int p, int order, int branch_tag = 0);

/// Canonical a-normalized bidifferential
///   W = W_F + Σ c_{αβ} v_α ⊗ v_β,
///   W_F = (2 y_1 y_2 + F(μ_1, μ_2)) / (4 (λ_1-λ_2)^2 y_1 y_2) dλ_1 dλ_2,
/// with μ = λ - center and F(x,z) = Σ_k x^k z^k (2 f_{2k} + f_{2k+1}(x+z))
/// built from the coefficients of f in powers of μ. W_F splits as
///   d_2[(y_1+y_2)/(2 y_1 (λ_1-λ_2))] dλ_1 + Q(μ_1, μ_2) dλ_1 dλ_2 / (4 y_1 y_2)
/// with Q of degree 1 in μ_1 and 4 in μ_2.
class Bidiff {
 public:
  Bidiff(const Curve& c, const PeriodData& pd, cplx center);

  const Curve& curve() const { return *curve_; }
  const PeriodData& periods() const { return *pd_; }
  cplx center() const { return center_; }
  const std::array<cplx, 7>& fcoeffs() const { return f_; }
  const Eigen::Matrix<cplx, 2, 5>& Q() const { return Q_; }
  const Eigen::Matrix2cd& c() const { return c_; }
  double normalization_asymmetry() const { return std::abs(c_(0, 1) - c_(1, 0)); }

  cplx F(cplx m1, cplx m2) const;
  /// W_F / (dλ_1 dλ_2)
  cplx raw(const SurfacePoint& x1, const SurfacePoint& x2) const;
  /// W / (dλ_1 dλ_2)
  cplx operator()(const SurfacePoint& x1, const SurfacePoint& x2) const;
  /// Part of W(z, (λ, y))/dλ odd in y, multiplied by y (for cycle integrals).
  cplx odd_numerator(const SurfacePoint& z, cplx lambda) const;

  /// ∫ W(z, ·) over the oriented cycle (a_1, a_2, b_1, b_2), by direct quadrature
  QuadResult<cplx> cycle_period(const SurfacePoint& z, int cycle, const QuadratureConfig& cfg) const;

  /// ω-basis coefficients of the holomorphic part of ∫_q^p W(z,·), given
  /// J_j = ∫_q^p μ^j dλ/y (j = 0..4) along the chosen path.
  Eigen::Vector2cd holomorphic_part(const Eigen::Matrix<cplx, 5, 1>& J) const;

 private:
  const Curve* curve_;
  const PeriodData* pd_;
  cplx center_;
  std::array<cplx, 7> f_;
  Eigen::Matrix<cplx, 2, 5> Q_;
  Eigen::Matrix2cd c_;  // correction in the v-basis
  Eigen::Matrix2cd Tm_;  // rows: μ^0, μ^1 in terms of (ω_1, ω_2)
};

/// ∮ μ^j dλ/y over the oriented cycles, from the λ-moments by binomial shift.
Eigen::Matrix<cplx, 5, 4> shifted_moments(const PeriodData& pd, cplx center);

/// Jets of the regularized diagonal expansion at a branch point.
struct BidiffJets {
  int p = -1;
  int order = 0;
  BiSeries H_zeta;   // W in ζ minus 1/(ζ_1-ζ_2)^2
  BiSeries H_xi;     // W in ξ minus 1/(ξ_1-ξ_2)^2
  BiSeries HS_xi;    // same for the Schiffer bidifferential
  Series v_xi[2];    // v_α/dξ
  Series v_zeta[2];  // v_α/dζ
  // values at ξ = 0 (distinguished frame)
  cplx h00 = 0, h10 = 0, h01 = 0, h11 = 0;      // of W
  cplx hs00 = 0, hs10 = 0, hs01 = 0, hs11 = 0;  // of the Schiffer bidifferential
  Eigen::Vector2cd v0, v1;                      // v(0), v'(0)
  cplx S_B = 0, S_Sch = 0, S_Sch_route2 = 0;
  cplx S_Sch_zeta = 0, S_Sch_transported = 0;  // ζ-frame value and its transport to ξ
  cplx schwarzian_zeta_xi = 0;                 // {ζ, ξ}(0)
  cplx B00 = 0;                                // Bergman kernel B(P, P̄) in ξ
};

BidiffJets h_expansion(const Bidiff& w, const DistinguishedFrame& frame);

/// Bergman kernel Σ M_{αβ} v_α(x) conj(v_β(y)) for dλ-frame values.
cplx bergman_kernel(const PeriodData& pd, const SurfacePoint& x, const SurfacePoint& y);

/// Cross-check of (S_B, S_Sch) against the second route; throws ConsistencyFailure.
std::pair<cplx, cplx> projective_connections(const BidiffJets& j, double tol = 1e-8);

}  // namespace cone_spectra
