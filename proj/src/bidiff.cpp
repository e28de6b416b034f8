#include "cone_spectra/bidiff.hpp"

namespace cone_spectra {

namespace {

const cplx kEta = std::polar(1.0, 2 * kPi / 3);

// Bivariate polynomial F(x, z) as a series of order 6
BiSeries F_series(const std::array<cplx, 7>& f) {
  BiSeries F(6);
  for (int k = 0; k <= 3; ++k) {
    F.at(k, k) += 2.0 * f[2 * k];
    if (2 * k + 1 <= 6) {
      F.at(k + 1, k) += f[2 * k + 1];
      F.at(k, k + 1) += f[2 * k + 1];
    }
  }
  return F;
}

// even part of a series in ζ as a series in u = ζ^2
Series even_part(const Series& s) {
  Series r(s.order() / 2);
  for (int k = 0; k <= r.order(); ++k) r[k] = s[2 * k];
  return r;
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

DistinguishedFrame distinguished_frame(const Curve& c, int p, int order, int branch_tag) {
  if (p < 0 || p >= 6) throw Error(ErrorKind::NotABranchPoint, "branch index out of range");
  if (order < 14) throw Error(ErrorKind::InsufficientOrder, "distinguished frame needs series order >= 14");
  DistinguishedFrame fr;
  fr.p = p;
  fr.branch_tag = ((branch_tag % 3) + 3) % 3;
  fr.local = local_expansion(c, p, order + 3);
  fr.omega_integral = fr.local.omega.integral();
  const Series u = fr.omega_integral.shift_down(3);
  if (std::abs(u[0]) < 1e-13) throw Error(ErrorKind::DegenerateZero, "ω has a higher-order zero");
  const cplx root0 = std::pow(u[0], 1.0 / 3.0) * std::pow(kEta, fr.branch_tag);
  fr.xi_of_zeta = u.root(3, root0).shift_up(1).truncated(order);
  fr.zeta_of_xi = fr.xi_of_zeta.reversion();
  return fr;
}

Eigen::Matrix<cplx, 5, 4> shifted_moments(const PeriodData& pd, cplx center) {
  Eigen::Matrix<cplx, 5, 4> m = Eigen::Matrix<cplx, 5, 4>::Zero();
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i <= j; ++i) m.row(j) += binom(j, i) * std::pow(-center, j - i) * pd.moments.row(i);
  return m;
}

Bidiff::Bidiff(const Curve& c, const PeriodData& pd, cplx center)
    : curve_(&c), pd_(&pd), center_(center), f_(c.poly_coeffs(center)) {
  // N = F(x,z) - 2 f(z) - f'(z)(x - z) vanishes to second order on x = z
  BiSeries N = F_series(f_);
  for (int j = 0; j <= 6; ++j) {
    N.at(0, j) -= 2.0 * f_[j];
    if (j >= 1) {
      N.at(1, j - 1) -= static_cast<double>(j) * f_[j];
      N.at(0, j) += static_cast<double>(j) * f_[j];
    }
  }
  const BiSeries Qs = N.div_by_difference().div_by_difference();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) Q_(i, j) = Qs(i, j);
  double rest = 0;
  for (int i = 2; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) rest = std::max(rest, std::abs(Qs(i, j)));
  if (rest > 1e-9 * std::max(1.0, Q_.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::ConsistencyFailure, "Q polynomial has unexpected degree in the first variable");

  Tm_ << 1.0, 0.0, -center, 1.0;
  const auto m = shifted_moments(pd, center);
  Eigen::Matrix2cd P;
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b) {
      cplx s = 0;
      for (int j = 0; j < 5; ++j) s += Q_(i, j) * m(j, b);
      P(i, b) = 0.25 * s;
    }
  c_ = -(Tm_ * pd.A).transpose() * P;
}

cplx Bidiff::F(cplx x, cplx z) const {
  cplx s = 0;
  cplx xz = 1.0;
  for (int k = 0; k <= 3; ++k) {
    s += xz * (2.0 * f_[2 * k] + (2 * k + 1 <= 6 ? f_[2 * k + 1] : 0.0) * (x + z));
    xz *= x * z;
  }
  return s;
}

cplx Bidiff::raw(const SurfacePoint& x1, const SurfacePoint& x2) const {
  if (x1.is_branch() || x2.is_branch() || x1.y == cplx(0) || x2.y == cplx(0))
    throw Error(ErrorKind::DomainError, "bidifferential in the λ-frame is undefined at a branch point");
  const cplx m1 = x1.lambda - center_, m2 = x2.lambda - center_;
  const cplx d = x1.lambda - x2.lambda;
  if (d == cplx(0)) {
    if (std::abs(x1.y - x2.y) <= 1e-14 * std::abs(x1.y))
      throw Error(ErrorKind::DiagonalEvaluation, "bidifferential evaluated on the diagonal");
    // antipodal limit: Δ^2-coefficient of F(μ, μ+Δ) - 2 f(μ) sqrt(f(μ+Δ)/f(μ)), over -4 f
    const cplx mu = m1;
    cplx f0 = 0, f1 = 0, f2 = 0;
    for (int k = 6; k >= 0; --k) {
      f2 = f2 * mu + 2.0 * f1;
      f1 = f1 * mu + f0;
      f0 = f0 * mu + f_[k];
    }
    cplx Fzz = 0;
    for (int k = 0; k <= 3; ++k) {
      const double kk = k;
      const cplx a = 2.0 * f_[k * 2];
      const cplx b = 2 * k + 1 <= 6 ? f_[2 * k + 1] : 0.0;
      if (k >= 2) Fzz += a * kk * (kk - 1) * std::pow(mu, 2 * k - 2);
      if (k >= 2) Fzz += b * kk * (kk - 1) * std::pow(mu, 2 * k - 1);
      if (k >= 1) Fzz += b * (kk + 1) * kk * std::pow(mu, 2 * k - 1);
    }
    const cplx num = 0.5 * Fzz - 0.5 * f2 + 0.25 * f1 * f1 / f0;
    return num / (-4.0 * f0);
  }
  return (2.0 * x1.y * x2.y + F(m1, m2)) / (4.0 * d * d * x1.y * x2.y);
}

cplx Bidiff::operator()(const SurfacePoint& x1, const SurfacePoint& x2) const {
  const Eigen::Vector2cd v1 = pd_->v(x1), v2 = pd_->v(x2);
  return raw(x1, x2) + (v1.transpose() * c_ * v2)(0, 0);
}

cplx Bidiff::odd_numerator(const SurfacePoint& z, cplx lambda) const {
  const cplx d = z.lambda - lambda;
  const Eigen::Vector2cd vz = pd_->v(z);
  const Eigen::Vector2cd w = pd_->C * Eigen::Vector2cd(1.0, lambda);
  return F(z.lambda - center_, lambda - center_) / (4.0 * d * d * z.y) + (vz.transpose() * c_ * w)(0, 0);
}

QuadResult<cplx> Bidiff::cycle_period(const SurfacePoint& z, int cycle, const QuadratureConfig& cfg) const {
  return pd_->cycles.integrate(cycle, [&](cplx l) { return odd_numerator(z, l); }, cfg);
}

Eigen::Vector2cd Bidiff::holomorphic_part(const Eigen::Matrix<cplx, 5, 1>& J) const {
  Eigen::Vector2cd k;
  for (int i = 0; i < 2; ++i) k(i) = 0.25 * (Q_.row(i) * J)(0, 0);
  Eigen::Vector2cd out = Tm_.transpose() * k;
  const Eigen::Vector2cd I(J(0), J(1) + center_ * J(0));
  const Eigen::Vector2cd u = pd_->C * I;
  out += pd_->C.transpose() * (c_ * u);
  return out;
}

BidiffJets h_expansion(const Bidiff& w0, const DistinguishedFrame& fr) {
  const Curve& c = w0.curve();
  const PeriodData& pd = w0.periods();
  const int p = fr.p;
  const cplx ep = c.branch_point(p);
  const Bidiff w(c, pd, ep);
  const int N = fr.zeta_of_xi.order();
  const int Nu = N / 2 + 2;
  BidiffJets j;
  j.p = p;
  j.order = N - 3;

  // ζ-frame in the variables u = ζ1^2, w = ζ2^2
  const LocalExpansion le = local_expansion(c, p, 2 * Nu + 4);
  const Series S = even_part(le.s).truncated(Nu + 2);
  const Series Sinv = S.reciprocal();
  BiSeries num = F_series(w.fcoeffs()).truncated(Nu + 2);
  BiSeries SS = BiSeries::outer(S, S, Nu + 2);
  BiSeries uw(Nu + 2);
  uw.at(1, 0) = 1.0;
  uw.at(0, 1) = 1.0;
  num -= uw * SS;
  BiSeries Hu = num.div_by_difference().div_by_difference() * BiSeries::outer(Sinv, Sinv, Nu);
  Series Vu[2];
  for (int a = 0; a < 2; ++a) {
    j.v_zeta[a] = pd.C(a, 0) * le.omega1 + pd.C(a, 1) * le.omega2;
    Vu[a] = even_part(j.v_zeta[a]).truncated(Nu);
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) Hu += BiSeries::outer(Vu[a], Vu[b], Nu) * w.c()(a, b);

  // H in ζ
  Series sq(N);
  sq[2] = 1.0;
  j.H_zeta = Hu.truncated(N).compose(sq, sq);

  // transport to ξ
  const Series& z = fr.zeta_of_xi;
  const Series z2 = z * z;
  const Series zp = z.derivative();
  BiSeries part = Hu.truncated(N).compose(z2, z2) * BiSeries::outer(zp, zp, N - 1);
  BiSeries DD(N - 1);
  for (int a = 0; a <= N - 1; ++a)
    for (int b = 0; a + b <= N - 1; ++b) DD.at(a, b) = z[a + b + 1];
  const BiSeries DD2 = DD * DD;
  const BiSeries Kn = (BiSeries::outer(zp, zp, N - 1) - DD2).div_by_difference().div_by_difference();
  const BiSeries K = Kn * DD2.truncated(N - 3).reciprocal();
  j.H_xi = part.truncated(N - 3) + K;

  for (int a = 0; a < 2; ++a) j.v_xi[a] = j.v_zeta[a].truncated(N).compose(z) * zp;
  BiSeries vv(N - 3);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) vv += BiSeries::outer(j.v_xi[a], j.v_xi[b], N - 3) * pd.M(a, b);
  j.HS_xi = j.H_xi - vv * kPi;

  j.h00 = j.H_xi(0, 0);
  j.h10 = j.H_xi(1, 0);
  j.h01 = j.H_xi(0, 1);
  j.h11 = j.H_xi(1, 1);
  j.hs00 = j.HS_xi(0, 0);
  j.hs10 = j.HS_xi(1, 0);
  j.hs01 = j.HS_xi(0, 1);
  j.hs11 = j.HS_xi(1, 1);
  for (int a = 0; a < 2; ++a) {
    j.v0(a) = j.v_xi[a][0];
    j.v1(a) = j.v_xi[a][1];
  }
  j.S_B = 6.0 * j.h00;
  j.S_Sch = 6.0 * j.hs00;

  // second route: (ξ1-ξ2)^2 𝒮 = ζ'ζ'/DD^2 + (ξ1-ξ2)^2 (H_ζ∘ζ ζ'ζ' - π Σ M v v); S = 6 g_20
  const BiSeries g0 = BiSeries::outer(zp, zp, N - 1) * DD2.reciprocal();
  const cplx vMv = (j.v0.transpose() * pd.M.cast<cplx>() * j.v0)(0, 0);
  j.S_Sch_route2 = 6.0 * (g0(2, 0) + part(0, 0) - kPi * vMv);

  // ζ-frame value and Schwarzian transport
  Eigen::Vector2cd vz0(Vu[0][0], Vu[1][0]);
  const cplx vMvz = (vz0.transpose() * pd.M.cast<cplx>() * vz0)(0, 0);
  j.S_Sch_zeta = 6.0 * (Hu(0, 0) - kPi * vMvz);
  j.schwarzian_zeta_xi = schwarzian(z)[0];
  j.S_Sch_transported = j.S_Sch_zeta * z[1] * z[1] + j.schwarzian_zeta_xi;

  j.B00 = (j.v0.transpose() * pd.M.cast<cplx>() * j.v0.conjugate())(0, 0);
  return j;
}

cplx bergman_kernel(const PeriodData& pd, const SurfacePoint& x, const SurfacePoint& y) {
  const Eigen::Vector2cd vx = pd.v(x), vy = pd.v(y);
  return (vx.transpose() * pd.M.cast<cplx>() * vy.conjugate())(0, 0);
}

std::pair<cplx, cplx> projective_connections(const BidiffJets& j, double tol) {
  const double scale = std::max(1.0, std::abs(j.S_Sch));
  if (std::abs(j.S_Sch - j.S_Sch_route2) > tol * scale)
    throw Error(ErrorKind::ConsistencyFailure, "projective connection routes disagree");
  return {j.S_B, j.S_Sch};
}

}  // namespace cone_spectra
