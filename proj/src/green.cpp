#include "cone_spectra/green.hpp"

namespace cone_spectra {

namespace {

double cross(cplx a, cplx b) { return (std::conj(a) * b).imag(); }

bool strictly_inside(cplx p, cplx a, cplx b, cplx c) {
  const double s1 = cross(b - a, p - a), s2 = cross(c - b, p - b), s3 = cross(a - c, p - c);
  return (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
}

template <class F>
QuadResult<double> integrate_breaks(F&& f, double a, double b, std::vector<double> breaks, const QuadratureConfig& cfg) {
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  for (double t : breaks)
    if (t > a + 1e-12 * (b - a) && t < b - 1e-12 * (b - a)) pts.push_back(t);
  pts.push_back(b);
  QuadResult<double> r{0.0, 0.0, 0};
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto p = integrate_interval(f, pts[k], pts[k + 1], cfg);
    r.value += p.value;
    r.error += p.error;
    r.subdivisions += p.subdivisions;
  }
  return r;
}

SurfacePoint shifted(const Curve& c, const SurfacePoint& p, cplx d) {
  return {p.lambda + d, c.continue_segment(p.lambda, p.y, p.lambda + d), -1};
}

bool same_point(const SurfacePoint& p, const SurfacePoint& q) {
  if (p.is_branch() || q.is_branch()) return p.branch_index == q.branch_index;
  const double s = 1e-13 * (1.0 + std::abs(p.lambda));
  return std::abs(p.lambda - q.lambda) <= s && std::abs(p.y - q.y) <= 1e-9 * std::abs(p.y);
}

}  // namespace

std::vector<cplx> avoiding_path(const Curve& c, const SurfacePoint& a, const SurfacePoint& b,
                                const std::vector<cplx>& poles) {
  return avoid_poles(c, c.surface_path(a, b), a.branch_index, b.branch_index, poles);
}

std::vector<cplx> avoid_poles(const Curve& c, std::vector<cplx> path, int ia, int ib, const std::vector<cplx>& poles) {
  if (poles.empty()) return path;
  const double cap = 0.1 * c.min_gap();
  const auto& e = c.branch_points();
  for (int iter = 0; iter < 64; ++iter) {
    bool changed = false;
    for (size_t k = 0; k + 1 < path.size() && !changed; ++k) {
      const cplx u = path[k], v = path[k + 1];
      for (cplx p : poles) {
        const double du = std::abs(u - p), dv = std::abs(v - p);
        const double tiny = 1e-14 * (1.0 + std::abs(p));
        if (du < tiny || dv < tiny) continue;
        const double m = std::min(cap, 0.25 * std::min(du, dv));
        if (segment_distance(p, u, v) >= m) continue;
        const bool first = (k == 0), last = (k + 2 == path.size());
        auto skip = [&](int j) { return (first && j == ia) || (last && j == ib); };
        double old_clear = 0.25 * c.min_gap();
        for (int j = 0; j < 6; ++j)
          if (!skip(j)) old_clear = std::min(old_clear, segment_distance(e[j], u, v));
        const double len = std::abs(v - u);
        const cplx d = (v - u) / len, n = kI * d;
        const double t0 = std::clamp(((p - u) * std::conj(d)).real(), 0.0, len);
        const cplx q = u + t0 * d;
        // the side away from the pole first
        const int away = cross(v - u, p - u) > 0 ? -1 : 1;
        auto admissible = [&](const std::vector<cplx>& w, size_t apex) {
          std::vector<cplx> poly{u};
          poly.insert(poly.end(), w.begin(), w.end());
          poly.push_back(v);
          for (size_t i = 0; i + 1 < poly.size(); ++i)
            if (segment_distance(p, poly[i], poly[i + 1]) < 0.99 * m) return false;
          for (int j = 0; j < 6; ++j) {
            if (std::abs(e[j] - u) < tiny || std::abs(e[j] - v) < tiny) continue;
            // the swept region is the triangle at the apex
            if (strictly_inside(e[j], poly[apex - 1], poly[apex], poly[apex + 1])) return false;
            for (size_t i = 0; i + 1 < poly.size(); ++i)
              if (segment_distance(e[j], poly[i], poly[i + 1]) < 0.5 * old_clear) return false;
          }
          return true;
        };
        // inserted vertices and the position of the apex in the new polyline
        std::vector<std::pair<std::vector<cplx>, size_t>> candidates;
        // local bump around the foot of the pole
        for (double f : {2.0, 3.0, 4.0})
          for (int s : {away, -away}) {
            const double ta = std::max(0.0, t0 - f * m), tb = std::min(len, t0 + f * m);
            const cplx w = q + static_cast<double>(s) * f * m * n;
            std::vector<cplx> bump;
            if (ta > 0.0) bump.push_back(u + ta * d);
            bump.push_back(w);
            if (tb < len) bump.push_back(u + tb * d);
            candidates.emplace_back(bump, ta > 0.0 ? 2 : 1);
          }
        // single vertex detour
        for (double f : {4.0, 8.0, 2.0, 16.0})
          for (int s : {1, -1}) candidates.push_back({{p + static_cast<double>(s) * f * m * n}, 1});
        bool done = false;
        for (const auto& [w, apex] : candidates) {
          if (!admissible(w, apex)) continue;
          path.insert(path.begin() + static_cast<long>(k) + 1, w.begin(), w.end());
          done = changed = true;
          break;
        }
        if (!done) throw Error(ErrorKind::PathTooCloseToBranchPoint, "cannot route the path around a pole");
        break;
      }
    }
    if (!changed) return path;
  }
  throw Error(ErrorKind::PathTooCloseToBranchPoint, "pole avoidance did not terminate");
}

// ---------------------------------------------------------------------------

namespace {

// Raw cycle integral ∮ h dλ/y. A pole of h close to the collapsed cycle is
// passed on a detour; crossing it changes the period by a residue, which is
// imaginary here and so leaves the real normalization unaffected.
template <class H>
cplx raw_period_near_pole(const Curve& c, const CycleBasis& cb, int k, cplx pole, H&& h,
                          const QuadratureConfig& cfg) {
  const auto& o = cb.order();
  const int ia = k < 2 ? o[static_cast<size_t>(2 * k)] : o[k == 2 ? 1 : 3];
  const int ib = k < 2 ? o[static_cast<size_t>(2 * k + 1)] : o[4];
  const cplx ea = c.branch_point(ia), eb = c.branch_point(ib);
  if (segment_distance(pole, ea, eb) > 0.1 * c.min_gap()) return cb.raw(k, h, cfg).value;
  const std::vector<cplx> path = avoid_poles(c, {ea, eb}, ia, ib, {pole});
  const SurfacePoint A = c.branch(ia), B = c.branch(ib);
  const cplx one = line_integral_on(c, path, A, B, [](cplx, cplx y) { return 1.0 / y; }, cfg).value;
  const cplx val = line_integral_on(c, path, A, B, [&](cplx l, cplx y) { return h(l) / y; }, cfg).value;
  // the collapsed cycle is twice the sheet integral; fix its sign on dλ/y
  const cplx ref = cb.raw(k, [](cplx) { return cplx(1.0); }, cfg).value;
  const double sign = (ref / one).real() > 0 ? 1.0 : -1.0;
  return sign * 2.0 * val;
}

}  // namespace

NormalizedThirdKind::NormalizedThirdKind(const Curve& c, const PeriodData& pd, const SurfacePoint& a,
                                         const QuadratureConfig& cfg)
    : c_(&c), pd_(&pd), a_(a), cfg_(cfg), kappa_(Eigen::Vector2cd::Zero()) {
  // only the y-odd part y_a/(2y(λ-λ_a)) has real periods; dλ/(2(λ-λ_a)) gives πi·winding
  Eigen::Vector4cd per = Eigen::Vector4cd::Zero();
  if (!a.is_branch()) {
    auto h = [&](cplx l) { return 0.5 * a.y / (l - a.lambda); };
    std::array<cplx, 4> raw;
    for (int k = 0; k < 4; ++k) raw[static_cast<size_t>(k)] = raw_period_near_pole(c, pd.cycles, k, a.lambda, h, cfg);
    // orientation as in CycleBasis::integrate
    per << raw[0], raw[1], static_cast<double>(pd.cycles.s1()) * raw[2],
        static_cast<double>(pd.cycles.s2()) * raw[3] + static_cast<double>(pd.cycles.mix()) * raw[0];
  }
  Eigen::Matrix4d S;
  Eigen::Vector4d rhs;
  for (int g = 0; g < 4; ++g) {
    for (int k = 0; k < 2; ++k) {
      S(g, k) = pd.moments(k, g).real();
      S(g, k + 2) = -pd.moments(k, g).imag();
    }
    rhs(g) = -per(g).real();
  }
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(S);
  if (lu.rcond() < 1e-13) throw Error(ErrorKind::SingularNormalizationSystem, "real normalization system is singular");
  const Eigen::Vector4d x = lu.solve(rhs);
  kappa_ << cplx(x(0), x(2)), cplx(x(1), x(3));
  for (int g = 0; g < 4; ++g)
    residual_ = std::max(residual_, std::abs((per(g) + kappa_(0) * pd.moments(0, g) + kappa_(1) * pd.moments(1, g)).real()));
}

cplx NormalizedThirdKind::operator()(cplx l, cplx y) const {
  return (y + a_.y) / (2.0 * y * (l - a_.lambda)) + (kappa_(0) + kappa_(1) * l) / y;
}

cplx NormalizedThirdKind::regular(cplx l, cplx y) const {
  return a_.y / (2.0 * y * (l - a_.lambda)) + (kappa_(0) + kappa_(1) * l) / y;
}

QuadResult<double> NormalizedThirdKind::real_integral(const SurfacePoint& from, const SurfacePoint& to) const {
  const double tiny = 1e-14 * (1.0 + std::abs(a_.lambda));
  if (std::abs(from.lambda - a_.lambda) < tiny || std::abs(to.lambda - a_.lambda) < tiny)
    throw Error(ErrorKind::CoincidentPoles, "real integral of N_a starts or ends over its pole");
  auto r = line_integral(*c_, from, to, [&](cplx l, cplx y) { return regular(l, y); }, cfg_, {a_.lambda});
  QuadResult<double> out;
  out.value = 0.5 * (std::log(std::abs(to.lambda - a_.lambda)) - std::log(std::abs(from.lambda - a_.lambda))) +
              r.value.real();
  out.error = r.error;
  out.subdivisions = r.subdivisions;
  return out;
}

Series NormalizedThirdKind::xi_series(const DistinguishedFrame& fr, int order) const {
  if (a_.is_branch() && a_.branch_index == fr.p)
    throw Error(ErrorKind::CoincidentPoles, "N_a expanded at its own pole");
  const int N = order + 2;
  const Series lam = fr.local.lambda.truncated(N);
  const Series s = fr.local.s.truncated(N);
  const Series zeta = Series::identity(N);
  // N_a/dζ = (ζ s + y_a)/(s (λ - λ_a)) + 2(κ_1 + κ_2 λ)/s
  const Series num = zeta * s + Series::constant(a_.y, N);
  const Series den = s * (lam - Series::constant(a_.lambda, N));
  const Series nz = num / den + (Series::constant(2.0 * kappa_(0), N) + 2.0 * kappa_(1) * lam) / s;
  const Series zx = fr.zeta_of_xi.truncated(N);
  return (nz.compose(zx) * zx.derivative()).truncated(order);
}

// ---------------------------------------------------------------------------

ThirdKindForm::ThirdKindForm(const Bidiff& w, const SurfacePoint& p, const SurfacePoint& q, const QuadratureConfig& cfg)
    : w_(&w), p_(p), q_(q) {
  if (same_point(p, q)) throw Error(ErrorKind::CoincidentPoles, "third-kind differential with p = q");
  const Curve& c = w.curve();
  const PeriodData& pd = w.periods();
  const cplx m = w.center();
  using V5 = Eigen::Matrix<cplx, 5, 1>;
  const auto J = line_integral(c, q, p, [&](cplx l, cplx y) {
    V5 r;
    cplx mu = 1.0;
    for (int j = 0; j < 5; ++j) {
      r(j) = mu / y;
      mu *= (l - m);
    }
    return r;
  }, cfg).value;
  const Eigen::Vector2cd I(J(0), J(1) + m * J(0));
  u_ = pd.C * I;
  const Eigen::Vector2d d = pd.M * Eigen::Vector2d(u_(0).imag(), u_(1).imag());
  hol_ = w.holomorphic_part(J) - 2.0 * kPi * kI * (pd.C.transpose() * d.cast<cplx>());
}

cplx ThirdKindForm::operator()(const SurfacePoint& z) const {
  if (z.is_branch()) throw Error(ErrorKind::DomainError, "Ω/dλ is undefined at a branch point");
  auto phi = [&](const SurfacePoint& a) {
    if (a.is_branch()) return 1.0 / (2.0 * (z.lambda - a.lambda));
    return (z.y + a.y) / (2.0 * z.y * (z.lambda - a.lambda));
  };
  return phi(p_) - phi(q_) + (hol_(0) + hol_(1) * z.lambda) / z.y;
}

cplx ThirdKindForm::contour_residue(const SurfacePoint& at, double r, int n) const {
  const Curve& c = w_->curve();
  cplx s = 0;
  for (int k = 0; k < n; ++k) {
    const cplx d = std::polar(r, 2 * kPi * k / n);
    const SurfacePoint z{at.lambda + d, c.continue_segment(at.lambda, at.y, at.lambda + d), -1};
    s += (*this)(z) * d;
  }
  return s / static_cast<double>(n);
}

Eigen::Vector4d ThirdKindForm::real_periods(const QuadratureConfig& cfg) const {
  const PeriodData& pd = w_->periods();
  Eigen::Vector4d out;
  for (int g = 0; g < 4; ++g) {
    const cplx v = pd.cycles.integrate(g, [&](cplx l) {
      cplx h = hol_(0) + hol_(1) * l;
      if (!p_.is_branch()) h += 0.5 * p_.y / (l - p_.lambda);
      if (!q_.is_branch()) h -= 0.5 * q_.y / (l - q_.lambda);
      return h;
    }, cfg).value;
    out(g) = v.real();
  }
  return out;
}

// ---------------------------------------------------------------------------

GreenFunction::GreenFunction(const Curve& c, const PeriodData& pd, const GreenConfig& cfg)
    : c_(&c), pd_(&pd), cfg_(cfg), z0_{c.base(), c.base_y(), -1},
      potential_(c, pd.cone_point, cfg.potential_harmonics, cfg.potential_angles) {
  cfg_.quad.validate();
  if (pd.cone_point < 0) throw Error(ErrorKind::NotABranchPoint, "period data carry no cone point");
  if (!(pd.area_bilinear > 0)) throw Error(ErrorKind::DomainError, "surface area must be positive");
  n0_.emplace(c, pd, z0_, cfg_.quad);
}

NormalizedThirdKind GreenFunction::third_kind(const SurfacePoint& a) const {
  return NormalizedThirdKind(*c_, *pd_, a, cfg_.quad);
}

double log_potential_adaptive(const Curve& c, int cone_point, cplx lam, const QuadratureConfig& cfg, double rel_tol) {
  const Curve* c_ = &c;
  const auto& e = c.branch_points();
  const cplx eP = e[static_cast<size_t>(cone_point)];
  const cplx cen = c.centroid();
  const double rho = c.min_gap() / 3.0;
  QuadratureConfig in = cfg, out = cfg;
  out.rel_tol = rel_tol;
  in.rel_tol = 0.1 * rel_tol;
  out.abs_tol = 1e-4 * rel_tol;
  in.abs_tol = 0.1 * out.abs_tol;

  auto chi_sum = [&](cplx u) {
    double s = 0;
    for (const auto& ej : e) s += bump(std::abs(u - ej), rho);
    return s;
  };
  auto weight = [&](cplx u) { return std::norm(u - eP) / std::abs(c_->f(u)); };

  double total = 0;
  // branch disks, polar about e_j with r = rho s^2
  for (size_t j = 0; j < e.size(); ++j) {
    const cplx ej = e[j];
    auto density = [&](double s, cplx dir, cplx& u) {
      const double r = rho * s * s;
      u = ej + r * dir;
      double wr = std::norm(u - eP);
      for (size_t k = 0; k < e.size(); ++k)
        if (k != j) wr /= std::abs(u - e[k]);
      return bump(r, rho) * wr * 2.0 * rho * s;
    };
    const double dj = std::abs(lam - ej);
    std::vector<double> sb{0.5};
    if (dj < rho) sb.push_back(std::sqrt(dj / rho));
    const double th0 = std::arg(lam - ej);
    auto inner = [&](double th) {
      const cplx dir = std::polar(1.0, th);
      auto f = [&](double s) {
        cplx u;
        const double d = density(s, dir, u);
        return d == 0.0 ? 0.0 : d * std::log(std::abs(lam - u));
      };
      return integrate_breaks(f, 0.0, 1.0, sb, in).value;
    };
    total += integrate_breaks(inner, th0 - kPi, th0 + kPi, {th0}, out).value;
  }

  // remainder, polar about λ; r = Rfar / t beyond Rfar
  double spread = 0;
  for (const auto& ej : e) spread = std::max(spread, std::abs(ej - cen));
  const double Rfar = std::abs(lam - cen) + spread + 2 * rho;
  std::vector<double> tb;
  for (const auto& ej : e) {
    const double d = std::abs(ej - lam);
    const double a = std::arg(ej - lam);
    tb.push_back(a);
    for (double rr : {rho, 0.25 * rho})
      if (d > rr) {
        const double h = std::asin(rr / d);
        tb.push_back(a + h);
        tb.push_back(a - h);
      }
  }
  for (double& t : tb) {
    while (t < -kPi) t += 2 * kPi;
    while (t > kPi) t -= 2 * kPi;
  }
  auto inner = [&](double th) {
    const cplx dir = std::polar(1.0, th);
    // chords of the ray through the transition annuli
    std::vector<double> rb;
    for (const auto& ej : e) {
      const cplx q = ej - lam;
      const double t0 = (std::conj(dir) * q).real();
      const double h2 = std::norm(q) - t0 * t0;
      for (double rr : {rho, 0.25 * rho})
        if (rr * rr > h2) {
          const double w = std::sqrt(rr * rr - h2);
          rb.push_back(t0 - w);
          rb.push_back(t0 + w);
        }
    }
    auto near = [&](double r) {
      if (r == 0.0) return 0.0;
      const cplx u = lam + r * dir;
      const double chi = 1.0 - chi_sum(u);
      if (chi <= 0.0) return 0.0;
      return chi * weight(u) * r * std::log(r);
    };
    auto far = [&](double t) {
      const double r = Rfar / t;
      const cplx u = lam + r * dir;
      return weight(u) * r * std::log(r) * Rfar / (t * t);
    };
    return integrate_breaks(near, 0.0, Rfar, rb, in).value + integrate_interval(far, 0.0, 1.0, in).value;
  };
  total += integrate_breaks(inner, -kPi, kPi, tb, out).value;
  return total;
}

// ---------------------------------------------------------------------------

double LogPotential::Ring::r_of_x(double x) const {
  if (kind == 0) return rho * x * x;
  return x <= R ? x : R * R / (2 * R - x);
}

double LogPotential::Ring::x_of_r(double r) const {
  if (kind == 0) return std::sqrt(r / rho);
  return r <= R ? r : 2 * R - R * R / r;
}

LogPotential::LogPotential(const Curve& c, int cone_point, int harmonics, int angles) : M_(harmonics) {
  if (cone_point < 0 || cone_point >= 6) throw Error(ErrorKind::NotABranchPoint, "cone point index out of range");
  if (harmonics < 8 || angles < 2 * harmonics + 2)
    throw Error(ErrorKind::InvalidConfig, "log potential needs harmonics >= 8 and angles > 2·harmonics");
  const auto& e = c.branch_points();
  const cplx eP = e[static_cast<size_t>(cone_point)];
  const cplx cen = c.centroid();
  const double rho = c.min_gap() / 3.0;
  double spread = 0;
  for (const auto& ej : e) spread = std::max(spread, std::abs(ej - cen));
  const int q = 16;
  const GaussRule& gl = gauss_legendre(q);

  auto fill = [&](Ring& g, const std::function<double(cplx)>& dens) {
    const size_t np = g.edges.size() - 1;
    g.x.resize(np * q);
    g.w.resize(np * q);
    g.F.resize(static_cast<long>(np * q), M_ + 1);
    std::vector<cplx> rot(static_cast<size_t>(angles));
    for (int k = 0; k < angles; ++k) rot[static_cast<size_t>(k)] = std::polar(1.0, 2 * kPi * (k + 0.5) / angles);
    for (size_t p = 0; p < np; ++p)
      for (int i = 0; i < q; ++i) {
        const size_t n = p * q + static_cast<size_t>(i);
        const double a = g.edges[p], b = g.edges[p + 1];
        const double x = a + 0.5 * (b - a) * (gl.x[static_cast<size_t>(i)] + 1.0);
        g.x[n] = x;
        g.w[n] = 0.5 * (b - a) * gl.w[static_cast<size_t>(i)];
        const double r = g.r_of_x(x);
        const double jac = g.kind == 0 ? 2 * rho * x : (x <= g.R ? 1.0 : r * r / (g.R * g.R));
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(M_ + 1);
        for (int k = 0; k < angles; ++k) {
          const cplx dir = rot[static_cast<size_t>(k)];
          const double d = dens(g.center + r * dir);
          if (d == 0.0) continue;
          // e^{-imθ} by recurrence
          cplx ph = d, step = std::conj(dir);
          for (int m = 0; m <= M_; ++m) {
            acc(m) += ph;
            ph *= step;
          }
        }
        g.F.row(static_cast<long>(n)) = acc.transpose() * (2 * kPi / angles * jac * (g.kind == 0 ? 1.0 : r));
      }
  };

  // branch patches: density χ_j w r, with w r = |u - e_P|^2 / ∏_{k≠j} |u - e_k|
  patch_density_ = [e, eP, rho](size_t j, cplx u) {
    const double r = std::abs(u - e[j]);
    const double chi = bump(r, rho);
    if (chi == 0.0) return 0.0;
    double wr = std::norm(u - eP);
    for (size_t k = 0; k < e.size(); ++k)
      if (k != j) wr /= std::abs(u - e[k]);
    return chi * wr;
  };
  for (size_t j = 0; j < e.size(); ++j) {
    Ring g;
    g.kind = 0;
    g.center = e[j];
    g.rho = rho;
    g.edges = {0.0, 0.25, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    fill(g, [&](cplx u) { return patch_density_(j, u); });
    rings_.push_back(std::move(g));
  }
  // remainder about the centroid
  {
    Ring g;
    g.kind = 1;
    g.center = cen;
    g.rho = rho;
    g.R = spread + 2 * rho;
    const int nb = static_cast<int>(std::ceil(g.R / (rho / 6)));
    for (int i = 0; i <= nb; ++i) g.edges.push_back(g.R * i / nb);
    for (int k = 1; k <= 30; ++k) g.edges.push_back(2 * g.R - g.R * std::pow(0.5, k));
    g.edges.push_back(2 * g.R);
    fill(g, [&](cplx u) {
      double chi = 1.0;
      for (const auto& ej : e) chi -= bump(std::abs(u - ej), rho);
      if (chi <= 0.0) return 0.0;
      return chi * std::norm(u - eP) / std::abs(c.f(u));
    });
    rings_.push_back(std::move(g));
  }
}

Eigen::VectorXcd LogPotential::ring_harmonics(const Ring& g, double rl) const {
  // P_0 = ∫ F_0 log max(r, rl),  P_m = ∫ F_m (r_</r_>)^m / m
  Eigen::VectorXcd P = Eigen::VectorXcd::Zero(M_ + 1);
  auto add = [&](double wt, double r, const cplx* F, long stride) {
    P(0) += wt * F[0] * std::log(std::max(r, rl));
    const double ratio = std::min(r, rl) / std::max(r, rl);
    double pw = 1.0;
    for (int m = 1; m <= M_; ++m) {
      pw *= ratio;
      if (pw < 1e-17) break;
      P(m) += (wt * pw / m) * F[m * stride];
    }
  };
  const int q = 16;
  const GaussRule& gl = gauss_legendre(q);
  const long stride = g.F.outerStride();
  const double xl = (g.kind == 0 && rl >= g.rho) ? 2.0 : g.x_of_r(rl);
  const size_t np = g.edges.size() - 1;
  Eigen::VectorXcd Fi(M_ + 1);
  for (size_t p = 0; p < np; ++p) {
    const double a = g.edges[p], b = g.edges[p + 1];
    if (!(xl > a && xl < b)) {
      for (int i = 0; i < q; ++i) {
        const long n = static_cast<long>(p * q) + i;
        add(g.w[static_cast<size_t>(n)], g.r_of_x(g.x[static_cast<size_t>(n)]), &g.F(n, 0), stride);
      }
      continue;
    }
    // split at the target radius; interpolate the harmonics from the panel nodes
    for (const auto& [u, v] : {std::pair{a, xl}, std::pair{xl, b}}) {
      for (int i = 0; i < q; ++i) {
        const double x = u + 0.5 * (v - u) * (gl.x[static_cast<size_t>(i)] + 1.0);
        const double wx = 0.5 * (v - u) * gl.w[static_cast<size_t>(i)];
        Fi.setZero();
        for (int k = 0; k < q; ++k) {
          const double xk = g.x[p * q + static_cast<size_t>(k)];
          double L = 1.0;
          for (int l = 0; l < q; ++l)
            if (l != k) {
              const double xm = g.x[p * q + static_cast<size_t>(l)];
              L *= (x - xm) / (xk - xm);
            }
          Fi += L * g.F.row(static_cast<long>(p * q) + k).transpose();
        }
        add(wx, g.r_of_x(x), Fi.data(), 1);
      }
    }
  }
  return P;
}

double LogPotential::ring_potential(const Ring& g, cplx lam) const {
  const double rl = std::abs(lam - g.center);
  const Eigen::VectorXcd P = ring_harmonics(g, rl);
  const cplx dir = rl > 0 ? (lam - g.center) / rl : cplx(1.0);
  double v = P(0).real();
  cplx ph = 1.0;
  for (int m = 1; m <= M_; ++m) {
    ph *= dir;
    v -= (P(m) * ph).real();
  }
  return v;
}

double LogPotential::self_energy(const Ring& g) const {
  double s = 0;
  for (size_t i = 0; i < g.x.size(); ++i) {
    const Eigen::VectorXcd P = ring_harmonics(g, g.r_of_x(g.x[i]));
    const long n = static_cast<long>(i);
    double v = (g.F(n, 0) * P(0)).real();
    for (int m = 1; m <= M_; ++m) v -= (P(m) * std::conj(g.F(n, m))).real();
    s += g.w[i] * v;
  }
  return s;
}

double LogPotential::energy(int radial, int angular) const {
  // E/2 = Σ_a E_aa + Σ_{j≠k} E_jk + 2 Σ_j E_{j,rest}; the cross terms with a
  // patch are integrated on that patch, where the other potentials are smooth
  const Ring& rest = rings_.back();
  double s = self_energy(rest);
  const GaussRule& gl = gauss_legendre(radial);
  for (size_t j = 0; j + 1 < rings_.size(); ++j) {
    const Ring& g = rings_[j];
    s += self_energy(g);
    const size_t np = g.edges.size() - 1;
    for (size_t p = 0; p < np; ++p)
      for (int i = 0; i < radial; ++i) {
        const double a = g.edges[p], b = g.edges[p + 1];
        const double x = a + 0.5 * (b - a) * (gl.x[static_cast<size_t>(i)] + 1.0);
        const double wx = 0.5 * (b - a) * gl.w[static_cast<size_t>(i)];
        const double r = g.r_of_x(x);
        for (int k = 0; k < angular; ++k) {
          const cplx u = g.center + std::polar(r, 2 * kPi * (k + 0.5) / angular);
          const double d = patch_density_(j, u) * 2 * g.rho * x;
          if (d == 0.0) continue;
          double other = 2.0 * ring_potential(rest, u);
          for (size_t l = 0; l + 1 < rings_.size(); ++l)
            if (l != j) other += ring_potential(rings_[l], u);
          s += wx * (2 * kPi / angular) * d * other;
        }
      }
  }
  return 2.0 * s;
}

double LogPotential::operator()(cplx lam) const {
  double s = 0;
  for (const auto& g : rings_) s += ring_potential(g, lam);
  return s;
}

double LogPotential::mass() const {
  double s = 0;
  for (const auto& g : rings_)
    for (size_t n = 0; n < g.x.size(); ++n) s += g.w[n] * g.F(static_cast<long>(n), 0).real();
  return s;
}

double GreenFunction::energy() const {
  if (!energy_) {
    energy_ = potential_.energy(cfg_.energy_radial, cfg_.energy_angular);
  }
  return *energy_;
}

cplx GreenFunction::cone_moment() const {
  if (!cone_moment_) {
    const cplx eP = c_->branch_point(pd_->cone_point);
    const SurfaceGrid grid = metric_grid(*c_, pd_->cone_point, cfg_.quad.surface_grid);
    cone_moment_ = grid.integrate([&](cplx l, int) { return 1.0 / (eP - l); });
  }
  return *cone_moment_;
}

double GreenFunction::reciprocity_term(const SurfacePoint& y) const {
  const cplx l0 = z0_.lambda;
  if (!y.is_branch() && std::abs(y.lambda - l0) < 1e-14 * (1.0 + std::abs(l0)))
    throw Error(ErrorKind::CoincidentPoles, "reciprocity term at the anchor point");
  const cplx cen = c_->centroid();
  const cplx dir = (cen - l0) / std::abs(cen - l0);
  const cplx L0 = cen + dir * 2.0 * (c_->diameter() + std::abs(y.lambda - cen));
  const NormalizedThirdKind& n0 = *n0_;
  auto g = [&](cplx l, cplx yy) { return n0.regular(l, yy); };
  double s = 0;
  for (int sheet : {1, -1}) {
    const SurfacePoint T{L0, static_cast<double>(sheet) * c_->y_ref(L0), -1};
    const cplx head = line_integral(*c_, y, T, g, cfg_.quad, {l0}).value;
    const cplx yT = T.y;
    const cplx tail = integrate_interval([&](double t) {
      if (t == 0.0) return cplx(0.0);
      const cplx l = cen + (L0 - cen) / t;
      return n0.regular(l, c_->continue_segment(L0, yT, l)) * (L0 - cen) / (t * t);
    }, 0.0, 1.0, cfg_.quad).value;
    s -= (head + tail).real();
  }
  return 0.5 * std::log(std::abs(y.lambda - l0)) + 0.5 * s;
}

double GreenFunction::grid_integral(const NormalizedThirdKind& n, const SurfaceGrid& grid) const {
  double s = 0;
  for (const auto& node : grid.nodes()) {
    const cplx yr = c_->y_ref(node.lambda);
    for (int sheet : {1, -1}) {
      const SurfacePoint q{node.lambda, static_cast<double>(sheet) * yr, -1};
      s += node.w * n.real_integral(z0_, q).value;
    }
  }
  return s;
}

double GreenFunction::evaluate(const SurfacePoint& x, const NormalizedThirdKind& ny, double Ry, double Dy) const {
  const double A = area();
  const double Nx = ny.real_integral(z0_, x).value;
  return (Nx - (log_potential(x.lambda) + Dy) / A + Ry + energy() / (A * A)) / (2 * kPi);
}

double GreenFunction::operator()(const SurfacePoint& x, const SurfacePoint& y) const {
  if (y.is_branch()) throw Error(ErrorKind::DomainError, "second argument of G must not be a branch point");
  if (same_point(x, y)) throw Error(ErrorKind::CoincidentArguments, "G(x, x) is singular");
  const NormalizedThirdKind ny = third_kind(y);
  return evaluate(x, ny, reciprocity_term(y), log_potential(y.lambda));
}

double GreenFunction::direct(const SurfacePoint& x, const SurfacePoint& y, const SurfaceGrid& grid) const {
  if (same_point(x, y)) throw Error(ErrorKind::CoincidentArguments, "G(x, x) is singular");
  const double A = area();
  const NormalizedThirdKind ny = third_kind(y);
  const double Nx = ny.real_integral(z0_, x).value;
  return (Nx - log_potential(x.lambda) / A - grid_integral(ny, grid) / A + energy() / (A * A)) / (2 * kPi);
}

// ---------------------------------------------------------------------------

SurfacePoint frame_point(const Curve& c, const DistinguishedFrame& fr, cplx xi) {
  const cplx zeta = fr.zeta_of_xi.eval(xi);
  const cplx ep = c.branch_point(fr.p);
  const cplx lam = ep + zeta * zeta;
  cplx y = zeta * fr.local.s[0];
  for (int k = 0; k < 6; ++k)
    if (k != fr.p) y *= std::sqrt((lam - c.branch_point(k)) / (ep - c.branch_point(k)));
  return {lam, y, -1};
}

cplx special_solution_zero(const GreenFunction& g, const DistinguishedFrame& fr, int l, const SurfacePoint& y) {
  if (fr.p != g.periods().cone_point) throw Error(ErrorKind::NotABranchPoint, "frame is not at the cone point");
  if (l != 1 && l != 2) throw Error(ErrorKind::DomainError, "special solutions are provided for l = 1, 2");
  if (y.is_branch() && y.branch_index == fr.p) throw Error(ErrorKind::ConeArgument, "y is the cone point");
  const Series n = g.third_kind(y).xi_series(fr, 3);
  if (l == 1) return -n[0];
  const cplx z1 = fr.zeta_of_xi[1];
  return -n[1] + z1 * z1 * g.cone_moment() / g.area();
}

CoefficientMatch coefficient_matching(const GreenFunction& g, const DistinguishedFrame& fr, const SurfacePoint& y,
                                      double r0, int n) {
  if (!(r0 > 0) || n < 8) throw Error(ErrorKind::InvalidConfig, "coefficient matching needs r0 > 0 and n >= 8");
  // the ξ^2 coefficient is recovered with relative roundoff ~ eps / r0^2
  if (r0 < 1e-4) throw Error(ErrorKind::FitIllConditioned, "matching circle too small for the quadratic coefficient");
  const Curve& c = g.curve();
  const NormalizedThirdKind ny = g.third_kind(y);
  const double Ry = g.reciprocity_term(y), Dy = g.log_potential(y.lambda);
  CoefficientMatch m;
  m.r0 = r0;
  for (auto& f : m.fitted) f = 0;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * kPi * k / n;
    const double G = g.evaluate(frame_point(c, fr, std::polar(r0, th)), ny, Ry, Dy);
    for (int q = 0; q < 3; ++q) m.fitted[q] += G * std::polar(1.0, -q * th) / (std::pow(r0, q) * n);
  }
  m.predicted[0] = g.evaluate(c.branch(fr.p), ny, Ry, Dy);
  m.predicted[1] = -special_solution_zero(g, fr, 1, y) / (4 * kPi);
  m.predicted[2] = -special_solution_zero(g, fr, 2, y) / (8 * kPi);
  for (int q = 0; q < 3; ++q) m.rel_error[q] = std::abs(m.fitted[q] - m.predicted[q]) / std::abs(m.predicted[q]);
  return m;
}

RegLog reg_log_limit(const GreenFunction& g, const SurfacePoint& y, const SurfaceGrid& grid) {
  const SurfacePoint P = g.curve().branch(g.periods().cone_point);
  RegLog r;
  r.green_at_p = g(P, y);
  r.value = 2 * kPi * r.green_at_p;
  r.value_direct = 2 * kPi * g.direct(P, y, grid);
  return r;
}

BergmanCheck bergman_consistency(const GreenFunction& g, const SurfacePoint& x, const SurfacePoint& y, double h) {
  const Curve& c = g.curve();
  if (!(h > 1e-8 * std::max(1.0, c.diameter()))) throw Error(ErrorKind::StepTooSmall, "finite-difference step too small");
  if (x.is_branch() || y.is_branch()) throw Error(ErrorKind::DomainError, "Bergman check needs non-branch points");
  const std::array<cplx, 2> dirs{cplx(h, 0), cplx(0, h)};
  // F[dx][sx][dy][sy] = 𝒩_{y'}(x') / 2π; the y-only terms drop out of ∂_x ∂_ȳ
  double F[2][2][2][2];
  for (int dy = 0; dy < 2; ++dy)
    for (int sy = 0; sy < 2; ++sy) {
      const SurfacePoint yp = shifted(c, y, (sy ? -1.0 : 1.0) * dirs[dy]);
      const NormalizedThirdKind n = g.third_kind(yp);
      for (int dx = 0; dx < 2; ++dx)
        for (int sx = 0; sx < 2; ++sx) {
          const SurfacePoint xp = shifted(c, x, (sx ? -1.0 : 1.0) * dirs[dx]);
          F[dx][sx][dy][sy] = n.real_integral(g.anchor(), xp).value / (2 * kPi);
        }
    }
  auto mixed = [&](int dx, int dy) {
    return (F[dx][0][dy][0] - F[dx][0][dy][1] - F[dx][1][dy][0] + F[dx][1][dy][1]) / (4 * h * h);
  };
  BergmanCheck b;
  b.mixed = 0.25 * cplx(mixed(0, 0) + mixed(1, 1), mixed(0, 1) - mixed(1, 0));
  b.bergman = bergman_kernel(g.periods(), x, y);
  return b;
}

double green_laplacian(const GreenFunction& g, const SurfacePoint& x, const SurfacePoint& y, double h) {
  if (x.is_branch()) throw Error(ErrorKind::DomainError, "Laplacian stencil needs a non-branch centre");
  const Curve& c = g.curve();
  const NormalizedThirdKind ny = g.third_kind(y);
  const double Ry = g.reciprocity_term(y), Dy = g.log_potential(y.lambda);
  auto G = [&](cplx d) {
    const cplx l = x.lambda + d;
    return g.evaluate(SurfacePoint{l, c.continue_segment(x.lambda, x.y, l), -1}, ny, Ry, Dy);
  };
  const double g0 = G(0.0);
  auto lap = [&](double s) { return (G(s) + G(-s) + G(kI * s) + G(-kI * s) - 4 * g0) / (s * s); };
  return (4 * lap(h) - lap(2 * h)) / 3 / metric_weight(c, g.periods().cone_point, x.lambda);
}

double log_coefficient(const GreenFunction& g, const SurfacePoint& y, double r1, double r2) {
  if (!(r1 > r2 && r2 > 0)) throw Error(ErrorKind::InvalidConfig, "log coefficient needs r1 > r2 > 0");
  const Curve& c = g.curve();
  const NormalizedThirdKind ny = g.third_kind(y);
  const double Ry = g.reciprocity_term(y), Dy = g.log_potential(y.lambda);
  const cplx dir(0.6, 0.8);
  auto G = [&](double r) {
    const cplx l = y.lambda + r * dir;
    return g.evaluate(SurfacePoint{l, c.continue_segment(y.lambda, y.y, l), -1}, ny, Ry, Dy);
  };
  return (G(r1) - G(r2)) / std::log(r1 / r2);
}

double green_mean(const GreenFunction& g, const SurfacePoint& y, const SurfaceGrid& grid) {
  const Curve& c = g.curve();
  const NormalizedThirdKind ny = g.third_kind(y);
  const double Ry = g.reciprocity_term(y), Dy = g.log_potential(y.lambda);
  double s = 0;
  for (const auto& n : grid.nodes())
    for (int sheet : {1, -1}) s += n.w * g.evaluate(c.point(n.lambda, sheet), ny, Ry, Dy);
  return s;
}

}  // namespace cone_spectra
