#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cone_spectra/numerics.hpp"

namespace cone_spectra {

/// Point of the curve y^2 = ∏(λ - λ_j). The value y is stored explicitly;
/// for a branch point y = 0 and branch_index names it.
struct SurfacePoint {
  cplx lambda;
  cplx y;
  int branch_index = -1;
  bool is_branch() const { return branch_index >= 0; }
};

class Curve {
 public:
  /// Base point defaults to centroid + 2i·diameter with the principal root.
  explicit Curve(std::vector<cplx> branch_points);
  Curve(std::vector<cplx> branch_points, cplx base);
  /// λ_1 and λ_k = λ_1 + r^2 e^{2πi(k-2)/5}, k = 2..6
  static Curve z5(cplx lambda1, double r);

  const std::vector<cplx>& branch_points() const { return e_; }
  cplx branch_point(int j) const { return e_.at(static_cast<size_t>(j)); }
  cplx base() const { return base_; }
  cplx base_y() const { return base_y_; }
  cplx centroid() const { return centroid_; }
  double min_gap() const { return min_gap_; }
  double diameter() const { return diameter_; }

  cplx f(cplx lambda) const;
  /// coefficients f_0..f_6 of ∏(λ - λ_j - shift) in powers of λ
  std::array<cplx, 7> poly_coeffs(cplx shift = 0.0) const;

  /// y continued along the straight segment from the base point
  cplx y_ref(cplx lambda) const;
  /// y at `to`, continued along the straight segment from (from, y_from)
  cplx continue_segment(cplx from, cplx y_from, cplx to) const;
  /// continuation of the base value along a polyline starting at the base point
  cplx continue_y(const std::vector<cplx>& path) const;
  /// continuation of y_start along an arbitrary polyline
  cplx continue_polyline(const std::vector<cplx>& path, cplx y_start) const;

  SurfacePoint point(cplx lambda, int sheet = 1) const;
  SurfacePoint branch(int j) const;
  SurfacePoint opposite(const SurfacePoint& p) const;
  /// ±1 relative to y_ref; 0 for branch points
  int sheet(const SurfacePoint& p) const;
  int branch_index_of(cplx lambda, double tol = 1e-12) const;

  /// Piecewise-straight λ-path from a to b, clear of branch points by
  /// min_gap/4, along which y continues from a to b.
  std::vector<cplx> surface_path(const SurfacePoint& a, const SurfacePoint& b) const;
  double path_clearance(const std::vector<cplx>& path, int skip_a = -1, int skip_b = -1) const;

 private:
  void init();
  std::vector<cplx> e_;
  cplx base_, base_y_, centroid_;
  double min_gap_ = 0, diameter_ = 0;
};

double segment_distance(cplx p, cplx a, cplx b);
double segment_segment_distance(cplx a, cplx b, cplx c, cplx d);

/// Homology basis on the cut plane. Branch points are relabelled by the
/// permutation `order`; cuts are [o0,o1], [o2,o3], [o4,o5]. a_k encircles cut
/// k (k = 0, 1); b_1, b_2 run from o1 and o3 to o4 on the principal sheet of
/// the cut-plane root and back on the other one.
class CycleBasis {
 public:
  CycleBasis() = default;
  CycleBasis(const Curve& c, std::array<int, 6> order);

  const std::array<int, 6>& order() const { return order_; }
  /// root that is single valued off the three cuts
  cplx y_cut(cplx lambda) const;

  void set_orientation(int s1, int s2, int mix) {
    s1_ = s1;
    s2_ = s2;
    mix_ = mix;
  }
  int s1() const { return s1_; }
  int s2() const { return s2_; }
  int mix() const { return mix_; }

  /// Raw cycle integrals ∮ h(λ) dλ / y over (a_1, a_2, β_1, β_2).
  template <class H>
  auto raw(int c, H&& h, const QuadratureConfig& cfg) const -> QuadResult<std::decay_t<decltype(h(cplx{}))>>;
  /// Oriented cycle integrals over (a_1, a_2, b_1, b_2).
  template <class H>
  auto integrate(int c, H&& h, const QuadratureConfig& cfg) const -> QuadResult<std::decay_t<decltype(h(cplx{}))>>;

 private:
  cplx factor(int k, cplx lambda, const std::array<cplx, 6>& d) const;
  std::array<cplx, 6> e_{};  // relabelled branch points
  std::array<int, 6> order_{};
  int s1_ = 1, s2_ = 1, mix_ = 0;
};

struct PeriodData {
  Eigen::Matrix2cd A, B, C, Bmat;  // Bmat = C B; C = A^{-1}
  Eigen::Matrix<cplx, 5, 4> moments;  // ∮ λ^j dλ/y, j = 0..4, over a_1, a_2, b_1, b_2
  Eigen::Matrix2d ImB, M;             // M = (Im Bmat)^{-1}
  double area = 0, area_bilinear = 0;
  double period_error = 0;
  int cone_point = -1;
  CycleBasis cycles;

  double asymmetry() const { return std::abs(Bmat(0, 1) - Bmat(1, 0)); }
  double a_normalization_error() const;
  /// (v_1, v_2)/dλ at a non-branch point
  Eigen::Vector2cd v(const SurfacePoint& p) const;
  Eigen::Vector2cd v_lambda(cplx lambda, cplx y) const;
};

/// Candidate relabellings in deterministic order (rotations of the angular
/// order first); `rotation` selects where the search starts.
std::array<int, 6> homology_order(const Curve& c, int rotation = 0);
PeriodData period_data(const Curve& c, int cone_point, const QuadratureConfig& cfg, int rotation = 0);

/// |ω/dλ|^2 for ω = (λ - λ_P) dλ / y
double metric_weight(const Curve& c, int cone_point, cplx lambda);
SurfaceGrid metric_grid(const Curve& c, int cone_point, const SurfaceGridConfig& cfg);

/// ω/dλ = (λ - λ_P)/y at a non-branch point
cplx singular_differential(const Curve& c, int cone_point, const SurfacePoint& p);

/// Expansions at a branch point in ζ = sqrt(λ - λ_p), with y = ζ s(ζ).
struct LocalExpansion {
  int p = -1;
  Series lambda;  // λ(ζ)
  Series s;       // s(ζ), s(0) principal root of ∏_{k≠p}(λ_p - λ_k)
  Series omega1, omega2;  // ω_i/dζ
  Series omega;           // ω/dζ for ω = (λ - λ_p) dλ / y
};
LocalExpansion local_expansion(const Curve& c, int p, int order);

// ---------------------------------------------------------------------------

template <class H>
auto CycleBasis::raw(int c, H&& h, const QuadratureConfig& cfg) const
    -> QuadResult<std::decay_t<decltype(h(cplx{}))>> {
  using V = std::decay_t<decltype(h(cplx{}))>;
  if (c == 0 || c == 1) {
    const int k = c;
    const cplx a = e_[2 * k], b = e_[2 * k + 1];
    const cplx m = 0.5 * (a + b), hh = 0.5 * (b - a);
    auto g = [&](double th) -> V {
      const cplx lam = m + hh * std::sin(th);
      std::array<cplx, 6> d;
      for (int j = 0; j < 6; ++j) d[j] = lam - e_[j];
      cplx prod = 1.0;
      for (int q = 0; q < 3; ++q)
        if (q != k) prod *= factor(q, lam, d);
      return h(lam) * (2.0 * kI / prod);
    };
    return integrate_interval(g, -kPi / 2, kPi / 2, cfg);
  }
  const int from = (c == 2) ? 1 : 3;
  const cplx a = e_[from], b = e_[4];
  const cplx m = 0.5 * (a + b), hh = 0.5 * (b - a);
  auto g = [&](double th) -> V {
    const cplx lam = m + hh * std::sin(th);
    std::array<cplx, 6> d;
    for (int j = 0; j < 6; ++j) d[j] = lam - e_[j];
    // accurate differences at the segment endpoints
    const double sp = std::sin(0.5 * (kPi / 2 - th)), sm = std::sin(0.5 * (kPi / 2 + th));
    d[4] = -2.0 * hh * sp * sp;
    d[from] = 2.0 * hh * sm * sm;
    cplx y = 1.0;
    for (int q = 0; q < 3; ++q) y *= factor(q, lam, d);
    return h(lam) * (2.0 * hh * std::cos(th) / y);
  };
  return integrate_interval(g, -kPi / 2, kPi / 2, cfg);
}

template <class H>
auto CycleBasis::integrate(int c, H&& h, const QuadratureConfig& cfg) const
    -> QuadResult<std::decay_t<decltype(h(cplx{}))>> {
  if (c == 0 || c == 1) return raw(c, h, cfg);
  if (c == 2) {
    auto r = raw(2, h, cfg);
    r.value *= static_cast<double>(s1_);
    return r;
  }
  auto r = raw(3, h, cfg);
  r.value *= static_cast<double>(s2_);
  if (mix_ != 0) {
    auto a = raw(0, h, cfg);
    r.value += a.value * static_cast<double>(mix_);
    r.error += a.error;
  }
  return r;
}

}  // namespace cone_spectra
