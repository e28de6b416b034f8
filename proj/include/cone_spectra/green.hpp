#pragma once

#include <functional>
#include <optional>

#include "cone_spectra/bidiff.hpp"

namespace cone_spectra {

/// surface_path(a, b) with detours keeping each segment at least a quarter of
/// the endpoint distance (capped at min_gap/10) away from every listed pole.
std::vector<cplx> avoiding_path(const Curve& c, const SurfacePoint& a, const SurfacePoint& b,
                                const std::vector<cplx>& poles = {});
/// Adds the same detours to a given polyline whose ends may be the branch
/// points ia, ib (-1 for none).
std::vector<cplx> avoid_poles(const Curve& c, std::vector<cplx> path, int ia, int ib, const std::vector<cplx>& poles);

/// ∫_a^b g(λ, y) dλ along avoiding_path(a, b, poles). A branch endpoint is
/// handled by λ - e = s^2 (·), so g may carry the 1/y singularity there.
template <class G>
auto line_integral(const Curve& c, const SurfacePoint& a, const SurfacePoint& b, G&& g,
                   const QuadratureConfig& cfg, const std::vector<cplx>& poles = {})
    -> QuadResult<std::decay_t<decltype(g(cplx{}, cplx{}))>>;
/// Same along a given polyline from a to b.
template <class G>
auto line_integral_on(const Curve& c, std::vector<cplx> path, const SurfacePoint& a, const SurfacePoint& b, G&& g,
                      const QuadratureConfig& cfg) -> QuadResult<std::decay_t<decltype(g(cplx{}, cplx{}))>>;

/// Third-kind differential N_a with residue +1 at a, -1/2 at ∞±, purely
/// imaginary periods:
///   N_a = (y + y_a) dλ / (2 y (λ - λ_a)) + (κ_1 + κ_2 λ) dλ / y.
class NormalizedThirdKind {
 public:
  NormalizedThirdKind(const Curve& c, const PeriodData& pd, const SurfacePoint& a, const QuadratureConfig& cfg);

  const SurfacePoint& pole() const { return a_; }
  const Eigen::Vector2cd& kappa() const { return kappa_; }
  /// largest |Re ∮ N_a| over the four cycles after normalization
  double period_residual() const { return residual_; }

  /// N_a / dλ at a non-branch point
  cplx operator()(cplx lambda, cplx y) const;
  /// N_a/dλ - 1/(2(λ - λ_a))
  cplx regular(cplx lambda, cplx y) const;
  /// Re ∫_from^to N_a
  QuadResult<double> real_integral(const SurfacePoint& from, const SurfacePoint& to) const;
  /// N_a/dξ at the branch point of the frame, as a series in ξ
  Series xi_series(const DistinguishedFrame& fr, int order = 4) const;

 private:
  const Curve* c_;
  const PeriodData* pd_;
  SurfacePoint a_;
  QuadratureConfig cfg_;
  Eigen::Vector2cd kappa_;
  double residual_ = 0;
};

/// Ω_{p-q}(z) = ∫_q^p W(z, ·) - 2πi Σ M_{αβ} v_α(z) Im ∫_q^p v_β,
/// residue +1 at p and -1 at q, purely imaginary periods.
class ThirdKindForm {
 public:
  ThirdKindForm(const Bidiff& w, const SurfacePoint& p, const SurfacePoint& q, const QuadratureConfig& cfg);

  /// Ω / dλ at a non-branch point
  cplx operator()(const SurfacePoint& z) const;
  /// ω-basis coefficients of the holomorphic part
  const Eigen::Vector2cd& holomorphic() const { return hol_; }
  /// ∫_q^p (v_1, v_2)
  const Eigen::Vector2cd& abel() const { return u_; }
  /// (1/2πi) ∮ Ω over a circle of radius r about the given non-branch point
  cplx contour_residue(const SurfacePoint& at, double r, int n = 64) const;
  /// Re ∮_γ Ω over the oriented cycles (a_1, a_2, b_1, b_2)
  Eigen::Vector4d real_periods(const QuadratureConfig& cfg) const;

 private:
  const Bidiff* w_;
  SurfacePoint p_, q_;
  Eigen::Vector2cd hol_, u_;
};

/// Log potential 𝒟(λ) = ∫ |ω/du|^2 log|λ - u| dA(u) over one sheet. The density
/// is split by the branch-patch partition; each piece is expanded in angular
/// harmonics about its centre (branch point or centroid) and
///   log|λ - u| = log r_> - Σ_{m>=1} (r_</r_>)^m cos(m(θ - θ')) / m
/// turns the area integral into radial integrals split at |λ - centre|.
class LogPotential {
 public:
  LogPotential(const Curve& c, int cone_point, int harmonics = 160, int angles = 640);
  double operator()(cplx lambda) const;
  /// ∫ |ω/du|^2 dA over one sheet (half the area)
  double mass() const;
  /// E = ∫ 𝒟 dS over both sheets; the patch cross terms use `radial` Gauss
  /// nodes per panel and `angular` points
  double energy(int radial = 8, int angular = 32) const;

  struct Ring {
    cplx center;
    int kind = 0;  // 0: patch, r = rho x^2; 1: remainder, r = x up to R, then R^2/(2R - x)
    double rho = 0, R = 0;
    std::vector<double> edges;  // panel edges in x
    std::vector<double> x, w;   // radial nodes and weights
    Eigen::MatrixXcd F;         // F(i, m) = ∫ density e^{-imθ} dθ · r dr/dx at x_i
    double r_of_x(double x) const;
    double x_of_r(double r) const;
  };

 private:
  Eigen::VectorXcd ring_harmonics(const Ring& g, double r) const;
  double ring_potential(const Ring& g, cplx lambda) const;
  double self_energy(const Ring& g) const;
  std::vector<Ring> rings_;
  std::function<double(size_t, cplx)> patch_density_;
  int M_ = 0;
};

/// 𝒟 by nested adaptive quadrature (reference evaluation).
double log_potential_adaptive(const Curve& c, int cone_point, cplx lambda, const QuadratureConfig& cfg,
                              double rel_tol = 1e-8);

struct GreenConfig {
  QuadratureConfig quad;
  int potential_harmonics = 160;
  int potential_angles = 640;
  int energy_radial = 8;
  int energy_angular = 32;
};

/// Green function of the flat metric |ω|^2, ω = (λ - λ_P) dλ / y. With
/// 𝒩_y(x) = Re ∫_{z0}^x N_y and the log potential
///   𝒟(λ) = ∫ |ω/du|^2 log|λ - u| dA(u)   (one sheet),
/// the double average of Re ∫_p^x Ω_{y-q} reduces to
///   2π G(x, y) = 𝒩_y(x) - (𝒟(x) + 𝒟(y))/A + R(y) + E/A^2,
/// where E = ∫ 𝒟 dS and R(y) = lim avg± [Re ∫_{Λ±}^y N_{z0} + log|Λ|/2].
class GreenFunction {
 public:
  GreenFunction(const Curve& c, const PeriodData& pd, const GreenConfig& cfg = {});

  const Curve& curve() const { return *c_; }
  const PeriodData& periods() const { return *pd_; }
  const GreenConfig& config() const { return cfg_; }
  /// area from the bilinear relation, which is far more accurate than a grid sum
  double area() const { return pd_->area_bilinear; }
  /// lower limit z0 of the real integrals (the curve base point)
  SurfacePoint anchor() const { return z0_; }

  NormalizedThirdKind third_kind(const SurfacePoint& a) const;
  double log_potential(cplx lambda) const { return potential_(lambda); }
  double energy() const;
  double reciprocity_term(const SurfacePoint& y) const;
  /// ∫ 𝒩 dS over the metric grid
  double grid_integral(const NormalizedThirdKind& n, const SurfaceGrid& grid) const;
  /// ∫ dS(q) / (λ_P - λ_q)
  cplx cone_moment() const;

  /// G(x, y); x may be a branch point, y must not be one
  double operator()(const SurfacePoint& x, const SurfacePoint& y) const;
  double evaluate(const SurfacePoint& x, const NormalizedThirdKind& ny, double Ry, double Dy) const;
  /// G with ∫ 𝒩_y dS taken on the metric grid instead of the reciprocity term
  double direct(const SurfacePoint& x, const SurfacePoint& y, const SurfaceGrid& grid) const;

 private:
  const Curve* c_;
  const PeriodData* pd_;
  GreenConfig cfg_;
  SurfacePoint z0_;
  LogPotential potential_;
  std::optional<NormalizedThirdKind> n0_;
  mutable std::optional<double> energy_;
  mutable std::optional<cplx> cone_moment_;
};

/// G_{1/ξ^l}(y; 0) for l = 1, 2 in the distinguished frame at the cone point.
cplx special_solution_zero(const GreenFunction& g, const DistinguishedFrame& fr, int l, const SurfacePoint& y);

/// Surface point at ξ in the distinguished frame.
SurfacePoint frame_point(const Curve& c, const DistinguishedFrame& fr, cplx xi);

struct CoefficientMatch {
  double r0 = 0;
  cplx fitted[3];    // coefficients of 1, ξ, ξ^2 in G(ξ, y)
  cplx predicted[3]; // G(P, y), -(1/4π) G_{1/ξ}, -(1/8π) G_{1/ξ^2}
  double rel_error[3];
};
/// Angular DFT of G(·, y) on |ξ| = r0 against the special solutions.
CoefficientMatch coefficient_matching(const GreenFunction& g, const DistinguishedFrame& fr, const SurfacePoint& y,
                                      double r0, int n = 32);

struct RegLog {
  double value = 0;          // (1/A^2) ∫∫ Re ∫_p^P Ω_{y-q} dS(p) dS(q), reciprocity form
  double value_direct = 0;   // same with ∫ 𝒩_y dS on the grid
  double green_at_p = 0;     // G(P, y)
};
RegLog reg_log_limit(const GreenFunction& g, const SurfacePoint& y, const SurfaceGrid& grid);

/// Property suite helpers. Δ_λ G(·, y) / |ω/dλ|^2 at x (→ -1/Area), by a
/// Richardson-extrapolated 5-point stencil with steps h and 2h.
double green_laplacian(const GreenFunction& g, const SurfacePoint& x, const SurfacePoint& y, double h = 1e-2);
/// d G(x, y) / d log|x - y| between radii r1 > r2 along a fixed ray (→ 1/2π)
double log_coefficient(const GreenFunction& g, const SurfacePoint& y, double r1 = 1e-3, double r2 = 1e-5);
/// ∫ G(x, y) dS(x) on the grid (→ 0)
double green_mean(const GreenFunction& g, const SurfacePoint& y, const SurfaceGrid& grid);

struct BergmanCheck {
  cplx mixed = 0;     // ∂_x ∂_ȳ G in the λ-frames, by finite differences
  cplx bergman = 0;   // B(x, ȳ) = Σ M v_α(x) conj v_β(y)
  cplx ratio() const { return mixed / bergman; }
};
BergmanCheck bergman_consistency(const GreenFunction& g, const SurfacePoint& x, const SurfacePoint& y, double h);

// ---------------------------------------------------------------------------

template <class G>
auto line_integral(const Curve& c, const SurfacePoint& a, const SurfacePoint& b, G&& g,
                   const QuadratureConfig& cfg, const std::vector<cplx>& poles)
    -> QuadResult<std::decay_t<decltype(g(cplx{}, cplx{}))>> {
  return line_integral_on(c, avoiding_path(c, a, b, poles), a, b, std::forward<G>(g), cfg);
}

template <class G>
auto line_integral_on(const Curve& c, std::vector<cplx> path, const SurfacePoint& a, const SurfacePoint& b, G&& g,
                      const QuadratureConfig& cfg) -> QuadResult<std::decay_t<decltype(g(cplx{}, cplx{}))>> {
  using V = std::decay_t<decltype(g(cplx{}, cplx{}))>;
  if (a.is_branch() && b.is_branch()) path.insert(path.begin() + 1, 0.5 * (path[0] + path[1]));
  const size_t n = path.size();
  // y at the vertices, continued from a non-branch reference
  std::vector<cplx> ys(n, 0.0);
  size_t ref = 0;
  if (a.is_branch()) {
    ref = b.is_branch() ? 1 : n - 1;
    ys[ref] = b.is_branch() ? c.y_ref(path[1]) : b.y;
  } else {
    ys[0] = a.y;
  }
  for (size_t k = ref + 1; k < n; ++k)
    if (!(k == n - 1 && b.is_branch())) ys[k] = c.continue_segment(path[k - 1], ys[k - 1], path[k]);
  for (size_t k = ref; k-- > 0;)
    if (!(k == 0 && a.is_branch())) ys[k] = c.continue_segment(path[k + 1], ys[k + 1], path[k]);

  QuadResult<V> total{V{}, 0.0, 0};
  bool first = true;
  const auto& e = c.branch_points();
  for (size_t k = 0; k + 1 < n; ++k) {
    const cplx u = path[k], v = path[k + 1];
    const bool ub = (k == 0 && a.is_branch()), vb = (k + 2 == n && b.is_branch());
    QuadResult<V> r;
    if (!ub && !vb) {
      const cplx yu = ys[k];
      r = integrate_interval([&](double t) -> V {
        const cplx l = u + t * (v - u);
        return g(l, c.continue_segment(u, yu, l)) * (v - u);
      }, 0.0, 1.0, cfg);
    } else {
      // λ = e_j + s^2 (o - e_j), with o the non-branch end; y = y_o s ∏_{k≠j} sqrt(...)
      const int j = ub ? a.branch_index : b.branch_index;
      const cplx ej = e[static_cast<size_t>(j)];
      const cplx o = ub ? v : u;
      const cplx yo = ub ? ys[k + 1] : ys[k];
      const double sign = ub ? 1.0 : -1.0;
      r = integrate_interval([&](double s) -> V {
        const cplx l = ej + s * s * (o - ej);
        cplx y = yo * s;
        for (size_t q = 0; q < e.size(); ++q)
          if (static_cast<int>(q) != j) y *= std::sqrt((l - e[q]) / (o - e[q]));
        return g(l, y) * (sign * 2.0 * s * (o - ej));
      }, 0.0, 1.0, cfg);
    }
    if (first) {
      total.value = r.value;
      first = false;
    } else {
      total.value += r.value;
    }
    total.error += r.error;
    total.subdivisions += r.subdivisions;
  }
  return total;
}

}  // namespace cone_spectra
