#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "cone_spectra/error.hpp"

namespace cone_spectra {

using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

struct SurfaceGridConfig {
  int radial = 24;    // nodes per branch patch, radial direction
  int angular = 32;   // nodes per branch patch, angular direction
  double R = 0.0;     // truncation radius of the bulk disk; 0 selects max|e_j - c| + 1
};

struct QuadratureConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  SurfaceGridConfig surface_grid;

  void validate() const;
};

template <class V>
struct QuadResult {
  V value;
  double error = 0.0;
  int subdivisions = 0;
};

inline double qnorm(double v) { return std::abs(v); }
inline double qnorm(const cplx& v) { return std::abs(v); }
template <class S, int R, int C, int O, int MR, int MC>
double qnorm(const Eigen::Matrix<S, R, C, O, MR, MC>& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

namespace detail {
// 21-point Kronrod abscissae on [0,1] (index 0 is the centre) and weights,
// 10-point Gauss weights for the odd-indexed abscissae.
const std::array<double, 11>& gk21_nodes();
const std::array<double, 11>& gk21_kronrod_weights();
const std::array<double, 5>& gk21_gauss_weights();

template <class V>
V zero_like(const V& v) {
  if constexpr (std::is_arithmetic_v<V> || std::is_same_v<V, cplx>) {
    return V(0);
  } else {
    V z = v;
    z.setZero();
    return z;
  }
}

template <class F, class V>
void gk21(F& f, double a, double b, V& value, double& err) {
  const auto& x = gk21_nodes();
  const auto& wk = gk21_kronrod_weights();
  const auto& wg = gk21_gauss_weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  V fc = f(c);
  V k = fc * wk[0];
  V g = zero_like(fc);
  for (int i = 1; i < 11; ++i) {
    V s = f(c - h * x[i]) + f(c + h * x[i]);
    k += s * wk[i];
    if (i % 2 == 1) g += s * wg[i / 2];
  }
  value = k * h;
  err = qnorm(V((k - g) * h));
  err = std::max(err, 1e-16 * qnorm(value));
}
}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) integration of a real-parameter
/// function whose values are double, complex or an Eigen vector.
template <class F>
auto integrate_interval(F&& f, double a, double b, const QuadratureConfig& cfg)
    -> QuadResult<std::decay_t<decltype(f(a))>> {
  using V = std::decay_t<decltype(f(a))>;
  struct Seg {
    double a, b;
    V val;
    double err;
  };
  auto cmp = [](const Seg& s, const Seg& t) { return s.err < t.err; };
  std::vector<Seg> heap;
  Seg s0{a, b, V{}, 0.0};
  detail::gk21(f, a, b, s0.val, s0.err);
  heap.push_back(s0);
  int splits = 0;
  for (;;) {
    V total = detail::zero_like(heap.front().val);
    double err = 0.0;
    for (const auto& s : heap) {
      total += s.val;
      err += s.err;
    }
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * qnorm(total)))
      return {total, err, splits};
    if (splits >= cfg.max_subdivisions)
      throw Error(ErrorKind::NonConvergence,
                  "adaptive quadrature exhausted " + std::to_string(cfg.max_subdivisions) +
                      " subdivisions (error " + std::to_string(err) + ")");
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Seg w = heap.back();
    heap.pop_back();
    const double m = 0.5 * (w.a + w.b);
    if (!(std::abs(w.b - w.a) > 1e-14 * std::abs(b - a)))
      throw Error(ErrorKind::NonConvergence, "adaptive quadrature interval underflow");
    Seg l{w.a, m, V{}, 0.0}, r{m, w.b, V{}, 0.0};
    detail::gk21(f, l.a, l.b, l.val, l.err);
    detail::gk21(f, r.a, r.b, r.val, r.err);
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++splits;
  }
}

/// ∫ f(z) dz along a polyline in the complex plane.
QuadResult<cplx> integrate_path(const std::function<cplx(cplx)>& f, const std::vector<cplx>& path,
                                const QuadratureConfig& cfg);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

double gamma(double x);

// ---------------------------------------------------------------------------
// Truncated power series  Σ_{k=0}^{N} c_k t^k

class Series {
 public:
  Series() = default;
  explicit Series(int order) : c_(static_cast<size_t>(order + 1)) {}
  explicit Series(std::vector<cplx> c) : c_(std::move(c)) {}
  static Series constant(cplx a, int order);
  static Series identity(int order);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](int k) const { return k >= 0 && k <= order() ? c_[k] : cplx(0); }
  cplx& operator[](int k) { return c_.at(static_cast<size_t>(k)); }
  const std::vector<cplx>& coeffs() const { return c_; }

  cplx eval(cplx t) const;
  Series truncated(int order) const;
  Series derivative() const;
  /// definite integral from 0; order increases by one
  Series integral() const;
  /// multiply by t^k
  Series shift_up(int k) const;
  /// divide by t^k (the first k coefficients are dropped)
  Series shift_down(int k) const;
  Series reciprocal() const;
  /// f^{1/k} with prescribed leading coefficient c0root (c0root^k = c_0)
  Series root(int k, cplx c0root) const;
  /// f(g(t)); requires g(0) = 0
  Series compose(const Series& g) const;
  /// functional inverse g with f(g(t)) = t; requires f(0) = 0, f'(0) != 0
  Series reversion() const;

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(cplx a);
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator-(Series a) { return a *= -1.0; }
  friend Series operator*(Series a, cplx s) { return a *= s; }
  friend Series operator*(cplx s, Series a) { return a *= s; }
  friend Series operator*(const Series& a, const Series& b);
  friend Series operator/(const Series& a, const Series& b) { return a * b.reciprocal(); }

 private:
  std::vector<cplx> c_;
};

/// {f,t} = f'''/f' - (3/2)(f''/f')^2, exact through order N-3.
Series schwarzian(const Series& f);

// ---------------------------------------------------------------------------
// Bivariate series Σ_{a+b<=N} h_{ab} x^a y^b (total-degree truncation)

class BiSeries {
 public:
  BiSeries() = default;
  explicit BiSeries(int order)
      : n_(order), c_(static_cast<size_t>((order + 1) * (order + 2) / 2)) {}
  static BiSeries outer(const Series& f, const Series& g, int order);

  int order() const { return n_; }
  cplx operator()(int a, int b) const {
    return (a >= 0 && b >= 0 && a + b <= n_) ? c_[idx(a, b)] : cplx(0);
  }
  cplx& at(int a, int b) { return c_.at(idx(a, b)); }

  cplx eval(cplx x, cplx y) const;
  BiSeries truncated(int order) const;
  BiSeries swapped() const;
  /// exact quotient by (x - y); result order N-1
  BiSeries div_by_difference() const;
  /// exact quotient by (x + y); result order N-1
  BiSeries div_by_sum() const;
  BiSeries reciprocal() const;
  /// H(p(x), q(y)) with p(0) = q(0) = 0
  BiSeries compose(const Series& p, const Series& q) const;
  double max_asymmetry() const;

  BiSeries& operator+=(const BiSeries& o);
  BiSeries& operator-=(const BiSeries& o);
  BiSeries& operator*=(cplx s);
  friend BiSeries operator+(BiSeries a, const BiSeries& b) { return a += b; }
  friend BiSeries operator-(BiSeries a, const BiSeries& b) { return a -= b; }
  friend BiSeries operator*(BiSeries a, cplx s) { return a *= s; }
  friend BiSeries operator*(const BiSeries& a, const BiSeries& b);

 private:
  static size_t idx(int a, int b) {
    const int d = a + b;
    return static_cast<size_t>(d * (d + 1) / 2 + b);
  }
  int n_ = 0;
  std::vector<cplx> c_;
};

// ---------------------------------------------------------------------------
// Two-sheet surface quadrature for the double cover of the λ-plane.

struct SurfaceNode {
  cplx lambda;
  double w;  // area element × weight × partition-of-unity factor (one sheet)
};

class SurfaceGrid {
 public:
  /// weight(λ) = |ω/dλ|^2 with at most |λ-e|^{-1} singularities at the
  /// listed points and |λ|^{-4} decay.
  SurfaceGrid(const std::vector<cplx>& singular_points, const std::function<double(cplx)>& weight,
              const SurfaceGridConfig& cfg, std::vector<double> radial_breaks = {});

  const std::vector<SurfaceNode>& nodes() const { return nodes_; }
  double patch_radius() const { return rho_; }
  double bulk_radius() const { return R_; }
  cplx center() const { return c_; }

  /// Σ over both sheets of f(λ, sheet)·weight
  template <class F>
  auto integrate(F&& f) const -> std::decay_t<decltype(f(cplx{}, 1))> {
    using V = std::decay_t<decltype(f(cplx{}, 1))>;
    V s{};
    for (const auto& n : nodes_) s += n.w * (f(n.lambda, 1) + f(n.lambda, -1));
    return s;
  }

 private:
  std::vector<SurfaceNode> nodes_;
  double rho_ = 0.0, R_ = 0.0;
  cplx c_;
};

/// Smooth cutoff equal to 1 on [0, rho/4] and 0 beyond rho.
double bump(double r, double rho);

}  // namespace cone_spectra
