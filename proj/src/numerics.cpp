#include "cone_spectra/numerics.hpp"

#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_integration.h>

namespace cone_spectra {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0))
    throw Error(ErrorKind::InvalidConfig, "rel_tol and abs_tol must be positive");
  if (max_subdivisions < 1) throw Error(ErrorKind::InvalidConfig, "max_subdivisions must be >= 1");
  if (surface_grid.radial < 4 || surface_grid.angular < 8)
    throw Error(ErrorKind::InvalidConfig, "surface grid too small");
  if (surface_grid.R < 0) throw Error(ErrorKind::InvalidConfig, "surface_grid.R must be >= 0");
}

namespace detail {

const std::array<double, 11>& gk21_nodes() {
  static const std::array<double, 11> x = [] {
    std::array<double, 11> a{};
    const auto& b = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    for (int i = 0; i < 11; ++i) a[i] = b[i];
    return a;
  }();
  return x;
}

const std::array<double, 11>& gk21_kronrod_weights() {
  static const std::array<double, 11> w = [] {
    std::array<double, 11> a{};
    const auto& b = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    for (int i = 0; i < 11; ++i) a[i] = b[i];
    return a;
  }();
  return w;
}

const std::array<double, 5>& gk21_gauss_weights() {
  static const std::array<double, 5> w = [] {
    std::array<double, 5> a{};
    const auto& b = boost::math::quadrature::gauss<double, 10>::weights();
    for (int i = 0; i < 5; ++i) a[i] = b[i];
    return a;
  }();
  return w;
}

}  // namespace detail

QuadResult<cplx> integrate_path(const std::function<cplx(cplx)>& f, const std::vector<cplx>& path,
                                const QuadratureConfig& cfg) {
  QuadResult<cplx> out{cplx(0), 0.0, 0};
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const cplx a = path[k], d = path[k + 1] - path[k];
    auto r = integrate_interval([&](double t) { return f(a + t * d) * d; }, 0.0, 1.0, cfg);
    out.value += r.value;
    out.error += r.error;
    out.subdivisions += r.subdivisions;
  }
  return out;
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double xi, wi;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &xi, &wi, t);
    r.x.push_back(xi);
    r.w.push_back(wi);
  }
  gsl_integration_glfixed_table_free(t);
  return cache.emplace(n, std::move(r)).first->second;
}

double gamma(double x) {
  if (!(x > 0)) throw Error(ErrorKind::DomainError, "gamma requires x > 0");
  return std::tgamma(x);
}

// ---------------------------------------------------------------------------

Series Series::constant(cplx a, int order) {
  Series s(order);
  s.c_[0] = a;
  return s;
}

Series Series::identity(int order) {
  Series s(order);
  if (order >= 1) s.c_[1] = 1.0;
  return s;
}

cplx Series::eval(cplx t) const {
  cplx r = 0;
  for (int k = order(); k >= 0; --k) r = r * t + c_[k];
  return r;
}

Series Series::truncated(int n) const {
  Series s(n);
  for (int k = 0; k <= n; ++k) s.c_[k] = (*this)[k];
  return s;
}

Series Series::derivative() const {
  Series s(std::max(order() - 1, 0));
  for (int k = 1; k <= order(); ++k) s.c_[k - 1] = static_cast<double>(k) * c_[k];
  return s;
}

Series Series::integral() const {
  Series s(order() + 1);
  for (int k = 0; k <= order(); ++k) s.c_[k + 1] = c_[k] / static_cast<double>(k + 1);
  return s;
}

Series Series::shift_up(int k) const {
  Series s(order() + k);
  for (int j = 0; j <= order(); ++j) s.c_[j + k] = c_[j];
  return s;
}

Series Series::shift_down(int k) const {
  Series s(order() - k);
  for (int j = k; j <= order(); ++j) s.c_[j - k] = c_[j];
  return s;
}

Series Series::reciprocal() const {
  if (std::abs(c_[0]) < 1e-13)
    throw Error(ErrorKind::SmallLeadingCoefficient, "series division by a leading coefficient below 1e-13");
  const int n = order();
  Series r(n);
  r.c_[0] = 1.0 / c_[0];
  for (int k = 1; k <= n; ++k) {
    cplx s = 0;
    for (int j = 1; j <= k; ++j) s += c_[j] * r.c_[k - j];
    r.c_[k] = -s / c_[0];
  }
  return r;
}

Series Series::root(int k, cplx c0root) const {
  if (std::abs(c_[0]) < 1e-13)
    throw Error(ErrorKind::SmallLeadingCoefficient, "root of a series with vanishing leading coefficient");
  const double alpha = 1.0 / k;
  const int n = order();
  Series g(n);
  g.c_[0] = c0root;
  for (int m = 1; m <= n; ++m) {
    cplx s = 0;
    for (int j = 1; j <= m; ++j) s += (alpha * j - (m - j)) * c_[j] * g.c_[m - j];
    g.c_[m] = s / (static_cast<double>(m) * c_[0]);
  }
  return g;
}

Series Series::compose(const Series& g) const {
  if (std::abs(g[0]) > 1e-12)
    throw Error(ErrorKind::DegenerateJet, "composition requires g(0) = 0");
  const int n = std::min(order(), g.order());
  Series r = Series::constant(c_[order()], n);
  Series gt = g.truncated(n);
  gt[0] = 0.0;
  for (int k = order() - 1; k >= 0; --k) {
    r = r * gt;
    r.c_[0] += c_[k];
  }
  return r.truncated(n);
}

Series Series::reversion() const {
  if (std::abs(c_[0]) > 1e-12 || order() < 1)
    throw Error(ErrorKind::DegenerateJet, "reversion requires f(0) = 0");
  if (std::abs(c_[1]) < 1e-13) throw Error(ErrorKind::DegenerateJet, "reversion requires f'(0) != 0");
  const int n = order();
  Series g(n);
  g.c_[1] = 1.0 / c_[1];
  for (int m = 2; m <= n; ++m) {
    // coefficient of t^m in f(g) with g_m = 0
    Series f0 = *this;
    f0[0] = 0.0;
    const cplx e = f0.compose(g)[m];
    g.c_[m] = -e / c_[1];
  }
  return g;
}

Series& Series::operator+=(const Series& o) {
  const int n = std::min(order(), o.order());
  c_.resize(static_cast<size_t>(n + 1));
  for (int k = 0; k <= n; ++k) c_[k] += o.c_[k];
  return *this;
}

Series& Series::operator-=(const Series& o) {
  const int n = std::min(order(), o.order());
  c_.resize(static_cast<size_t>(n + 1));
  for (int k = 0; k <= n; ++k) c_[k] -= o.c_[k];
  return *this;
}

Series& Series::operator*=(cplx a) {
  for (auto& x : c_) x *= a;
  return *this;
}

Series operator*(const Series& a, const Series& b) {
  const int n = std::min(a.order(), b.order());
  Series r(n);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  return r;
}

Series schwarzian(const Series& f) {
  if (std::abs(f[1]) < 1e-13) throw Error(ErrorKind::DegenerateJet, "schwarzian requires f'(0) != 0");
  const Series d1 = f.derivative();
  const Series d2 = d1.derivative();
  const Series d3 = d2.derivative();
  const Series inv = d1.truncated(d3.order()).reciprocal();
  const Series q = d2.truncated(d3.order()) * inv;
  return d3 * inv - 1.5 * (q * q);
}

// ---------------------------------------------------------------------------

BiSeries BiSeries::outer(const Series& f, const Series& g, int order) {
  BiSeries r(order);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) r.c_[idx(a, b)] = f[a] * g[b];
  return r;
}

cplx BiSeries::eval(cplx x, cplx y) const {
  cplx s = 0;
  for (int a = n_; a >= 0; --a) {
    cplx row = 0;
    for (int b = n_ - a; b >= 0; --b) row = row * y + c_[idx(a, b)];
    s = s * x + row;
  }
  return s;
}

BiSeries BiSeries::truncated(int order) const {
  BiSeries r(order);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) r.c_[idx(a, b)] = (*this)(a, b);
  return r;
}

BiSeries BiSeries::swapped() const {
  BiSeries r(n_);
  for (int a = 0; a <= n_; ++a)
    for (int b = 0; a + b <= n_; ++b) r.c_[idx(b, a)] = c_[idx(a, b)];
  return r;
}

BiSeries BiSeries::div_by_difference() const {
  BiSeries r(n_ - 1);
  for (int d = 1; d <= n_; ++d) {
    r.c_[idx(0, d - 1)] = -c_[idx(0, d)];
    for (int a = 1; a < d; ++a) r.c_[idx(a, d - 1 - a)] = r.c_[idx(a - 1, d - a)] - c_[idx(a, d - a)];
  }
  return r;
}

BiSeries BiSeries::div_by_sum() const {
  BiSeries r(n_ - 1);
  for (int d = 1; d <= n_; ++d) {
    r.c_[idx(0, d - 1)] = c_[idx(0, d)];
    for (int a = 1; a < d; ++a) r.c_[idx(a, d - 1 - a)] = c_[idx(a, d - a)] - r.c_[idx(a - 1, d - a)];
  }
  return r;
}

BiSeries BiSeries::reciprocal() const {
  const cplx h0 = c_[0];
  if (std::abs(h0) < 1e-13)
    throw Error(ErrorKind::SmallLeadingCoefficient, "bivariate division by a leading coefficient below 1e-13");
  BiSeries r(n_);
  r.c_[0] = 1.0 / h0;
  for (int d = 1; d <= n_; ++d)
    for (int a = 0; a <= d; ++a) {
      const int b = d - a;
      cplx s = 0;
      for (int i = 0; i <= a; ++i)
        for (int j = 0; j <= b; ++j)
          if (i + j > 0) s += c_[idx(i, j)] * r.c_[idx(a - i, b - j)];
      r.c_[idx(a, b)] = -s / h0;
    }
  return r;
}

BiSeries BiSeries::compose(const Series& p, const Series& q) const {
  const int n = n_;
  std::vector<Series> pp{Series::constant(1.0, n)}, qq{Series::constant(1.0, n)};
  const Series pt = p.truncated(n), qt = q.truncated(n);
  for (int k = 1; k <= n; ++k) {
    pp.push_back(pp.back() * pt);
    qq.push_back(qq.back() * qt);
  }
  BiSeries r(n);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b) {
      const cplx h = c_[idx(a, b)];
      if (h == cplx(0)) continue;
      for (int i = a; i <= n; ++i)
        for (int j = b; i + j <= n; ++j) r.c_[idx(i, j)] += h * pp[a][i] * qq[b][j];
    }
  return r;
}

double BiSeries::max_asymmetry() const {
  double m = 0;
  for (int a = 0; a <= n_; ++a)
    for (int b = 0; a + b <= n_; ++b) m = std::max(m, std::abs(c_[idx(a, b)] - c_[idx(b, a)]));
  return m;
}

BiSeries& BiSeries::operator+=(const BiSeries& o) {
  *this = truncated(std::min(n_, o.n_));
  for (int a = 0; a <= n_; ++a)
    for (int b = 0; a + b <= n_; ++b) c_[idx(a, b)] += o(a, b);
  return *this;
}

BiSeries& BiSeries::operator-=(const BiSeries& o) {
  *this = truncated(std::min(n_, o.n_));
  for (int a = 0; a <= n_; ++a)
    for (int b = 0; a + b <= n_; ++b) c_[idx(a, b)] -= o(a, b);
  return *this;
}

BiSeries& BiSeries::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  return *this;
}

BiSeries operator*(const BiSeries& x, const BiSeries& y) {
  const int n = std::min(x.n_, y.n_);
  BiSeries r(n);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b) {
      const cplx h = x.c_[BiSeries::idx(a, b)];
      if (h == cplx(0)) continue;
      for (int i = 0; a + i <= n; ++i)
        for (int j = 0; a + i + b + j <= n; ++j)
          r.c_[BiSeries::idx(a + i, b + j)] += h * y.c_[BiSeries::idx(i, j)];
    }
  return r;
}

// ---------------------------------------------------------------------------

double bump(double r, double rho) {
  const double r0 = 0.25 * rho;
  if (r <= r0) return 1.0;
  if (r >= rho) return 0.0;
  const double s = (r - r0) / (rho - r0);
  auto psi = [](double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = psi(1.0 - s), b = psi(s);
  return a / (a + b);
}

SurfaceGrid::SurfaceGrid(const std::vector<cplx>& pts, const std::function<double(cplx)>& weight,
                         const SurfaceGridConfig& cfg, std::vector<double> radial_breaks) {
  const size_t m = pts.size();
  c_ = 0;
  for (const auto& e : pts) c_ += e;
  if (m) c_ /= static_cast<double>(m);
  double gap = 1e300, spread = 0;
  for (size_t i = 0; i < m; ++i) {
    spread = std::max(spread, std::abs(pts[i] - c_));
    for (size_t j = i + 1; j < m; ++j) gap = std::min(gap, std::abs(pts[i] - pts[j]));
  }
  if (m < 2) gap = 1.0;
  rho_ = gap / 3.0;
  R_ = cfg.R > 0 ? cfg.R : spread + 1.0;
  if (R_ <= spread + rho_)
    throw Error(ErrorKind::InvalidConfig, "surface grid truncation radius does not enclose the branch patches");

  auto partition = [&](cplx z) {
    double s = 0;
    for (const auto& e : pts) s += bump(std::abs(z - e), rho_);
    return s;
  };

  const int nr = cfg.radial, na = cfg.angular;
  // branch patches: λ = e + rho s^2 e^{iθ}
  {
    const auto& g = gauss_legendre(nr);
    for (const auto& e : pts)
      for (int i = 0; i < nr; ++i) {
        const double s = 0.5 * (g.x[i] + 1.0), ws = 0.5 * g.w[i];
        const double r = rho_ * s * s;
        const double jac = 2.0 * rho_ * s * r;  // dr = 2 rho s ds, dA = r dr dθ
        for (int k = 0; k < na; ++k) {
          const double th = 2.0 * kPi * (k + 0.5) / na;
          const cplx z = e + std::polar(r, th);
          const double chi = bump(r, rho_);
          if (chi == 0.0) continue;
          nodes_.push_back({z, ws * jac * (2.0 * kPi / na) * chi * weight(z)});
        }
      }
  }
  // bulk disk |λ - c| < R with the branch patches removed by the partition
  {
    const int br = 3 * nr, ba = 4 * na;
    const auto& g = gauss_legendre(br);
    std::vector<double> edges{0.0};
    std::sort(radial_breaks.begin(), radial_breaks.end());
    for (double b : radial_breaks)
      if (b > 0 && b < R_) edges.push_back(b);
    edges.push_back(R_);
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
      const double r0 = edges[p], r1 = edges[p + 1];
      for (int i = 0; i < br; ++i) {
        const double r = r0 + 0.5 * (r1 - r0) * (g.x[i] + 1.0);
        const double wr = 0.5 * (r1 - r0) * g.w[i] * r;
        for (int k = 0; k < ba; ++k) {
          const double th = 2.0 * kPi * (k + 0.5) / ba;
          const cplx z = c_ + std::polar(r, th);
          const double chi = 1.0 - partition(z);
          if (chi <= 0.0) continue;
          nodes_.push_back({z, wr * (2.0 * kPi / ba) * chi * weight(z)});
        }
      }
    }
  }
  // exterior chart t = 1/(λ - c), |t| < 1/R
  {
    const int er = nr, ea = 2 * na;
    const auto& g = gauss_legendre(er);
    const double T = 1.0 / R_;
    for (int i = 0; i < er; ++i) {
      const double t = 0.5 * T * (g.x[i] + 1.0);
      const double wt = 0.5 * T * g.w[i] * t;
      for (int k = 0; k < ea; ++k) {
        const double th = 2.0 * kPi * (k + 0.5) / ea;
        const cplx z = c_ + 1.0 / std::polar(t, th);
        nodes_.push_back({z, wt * (2.0 * kPi / ea) * std::pow(t, -4.0) * weight(z)});
      }
    }
  }
  for (const auto& n : nodes_)
    for (const auto& e : pts)
      if (std::abs(n.lambda - e) < 1e-14 * (1.0 + std::abs(e)))
        throw Error(ErrorKind::SingularityOnGrid, "quadrature node coincides with a branch point");
}

}  // namespace cone_spectra
