#include "cone_spectra/smatrix.hpp"

namespace cone_spectra {

cplx symplectic_pairing(const ExpansionCoefficients& a, const ExpansionCoefficients& b) {
  cplx s = 0;
  for (int i = 0; i < 5; ++i) s += -a.x[i] * b.x[i + 5] + a.x[i + 5] * b.x[i];
  return s;
}

SMatrixZero t_matrix_zero(const BidiffJets& j, const PeriodData& pd) {
  if (j.order < 2) throw Error(ErrorKind::MissingJet, "T(0) needs H through bidegree (1,1)");
  const Eigen::Matrix2cd M = pd.M.cast<cplx>();
  auto q = [&](const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) { return (a.transpose() * M * b)(0, 0); };
  const Eigen::Vector2cd& v = j.v0;
  const Eigen::Vector2cd& vp = j.v1;

  SMatrixZero s;
  Eigen::Matrix4cd& T = s.T0;
  T.setZero();
  T(0, 0) = -j.S_Sch / 6.0;
  T(0, 1) = -j.h10 + kPi * q(v, vp);
  T(1, 0) = -0.5 * j.h01 + 0.5 * kPi * q(v, vp);
  T(1, 1) = -0.5 * j.h11 + 0.5 * kPi * q(vp, vp);
  T(2, 0) = kPi * j.B00;
  T(2, 1) = kPi * q(vp, v.conjugate());
  T(3, 0) = 0.5 * kPi * q(v, vp.conjugate());
  T(3, 1) = 0.5 * kPi * q(vp, vp.conjugate());
  T.block<2, 2>(0, 2) = T.block<2, 2>(2, 0).conjugate();
  T.block<2, 2>(2, 2) = T.block<2, 2>(0, 0).conjugate();
  s.conj_block_error = std::max((T.block<2, 2>(0, 2) - T.block<2, 2>(2, 0).conjugate()).cwiseAbs().maxCoeff(),
                                (T.block<2, 2>(2, 2) - T.block<2, 2>(0, 0).conjugate()).cwiseAbs().maxCoeff());
  s.P0 = T.block<2, 2>(2, 0);
  s.detT0 = T.determinant();
  s.detP0 = s.P0.determinant();
  s.piB = std::real(T(2, 0));
  const double t22 = std::abs(T(1, 1)), t11 = std::abs(T(0, 0));
  s.detT0_closed = t22 * t22 * (t11 * t11 - s.piB * s.piB);
  const double m = std::max(t22, 0.5 * s.piB);
  s.det_scale = s.piB * s.piB * m * m;
  s.norm_detT0 = std::abs(s.detT0) / s.det_scale;
  s.norm_detP0 = std::abs(s.detP0) / (s.piB * s.piB);
  return s;
}

DetRatios det_ratios(const SMatrixZero& s, double tol) {
  DetRatios r;
  r.ratio_sing = kComparisonFactor * kComparisonFactor * s.detT0;
  r.ratio_hol = kComparisonFactor * s.detP0;
  r.sing_degenerate = s.norm_detT0 < tol;
  r.hol_degenerate = s.norm_detP0 < tol;
  if (r.sing_degenerate) r.ratio_sing = 0.0;
  if (r.hol_degenerate) r.ratio_hol = 0.0;
  if (r.sing_degenerate) r.note = "comparison degenerate, kernel dimension > 1";
  if (r.hol_degenerate) r.note += std::string(r.note.empty() ? "" : "; ") + "holomorphic comparison degenerate (Weierstrass point)";
  return r;
}

KernelDiagnostics kernel_diagnostics(const SMatrixZero& s, const BidiffJets& j, double tol) {
  KernelDiagnostics k;
  const Eigen::Matrix4cd& T = s.T0;
  k.row2 = T.row(1).cwiseAbs().maxCoeff() / s.piB;
  k.row4 = T.row(3).cwiseAbs().maxCoeff() / s.piB;
  k.weierstrass = s.norm_detP0 < tol;
  k.sing_degenerate = s.norm_detT0 < tol;
  k.dimension3_signature = k.row2 < tol && k.row4 < tol;
  if (k.dimension3_signature)
    k.classification = "dimension 3 signature";
  else if (k.sing_degenerate)
    k.classification = "degenerate: dim Ker Δ_sing >= 2";
  else
    k.classification = "generic: dim Ker Δ_sing = 1 (conjectural)";
  const double sc = s.piB;
  k.audit = {{"|S_Sch(0)|/piB", std::abs(j.S_Sch) / sc},
             {"|T11|/piB", std::abs(T(0, 0)) / sc},
             {"|T12|/piB", std::abs(T(0, 1)) / sc},
             {"|T21|/piB", std::abs(T(1, 0)) / sc},
             {"|T22|/piB", std::abs(T(1, 1)) / sc},
             {"|T41|/piB", std::abs(T(3, 0)) / sc},
             {"normalized |detT0|", s.norm_detT0},
             {"normalized |detP0|", s.norm_detP0},
             {"|Im detT0|/det_scale", std::abs(std::imag(s.detT0)) / s.det_scale}};
  return k;
}

BidiffJets cone_point_jets(const Curve& c, const PeriodData& pd, int order, int branch_tag, int p) {
  if (p < 0) p = pd.cone_point;
  const Bidiff w(c, pd, c.branch_point(p));
  return h_expansion(w, distinguished_frame(c, p, order, branch_tag));
}

}  // namespace cone_spectra
