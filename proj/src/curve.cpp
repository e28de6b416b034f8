#include "cone_spectra/curve.hpp"

#include <numeric>

namespace cone_spectra {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double L2 = std::norm(d);
  if (L2 == 0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

namespace {

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

double segment_segment_distance(cplx a, cplx b, cplx c, cplx d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                   segment_distance(d, a, b)});
}

// ---------------------------------------------------------------------------

Curve::Curve(std::vector<cplx> bp) : e_(std::move(bp)) {
  init();
  base_ = centroid_ + kI * (2.0 * diameter_);
  base_y_ = std::sqrt(f(base_));
}

Curve::Curve(std::vector<cplx> bp, cplx base) : e_(std::move(bp)) {
  init();
  base_ = base;
  for (const auto& e : e_)
    if (std::abs(base - e) <= 1e-12 * (1.0 + diameter_))
      throw Error(ErrorKind::BaseOnBranchPoint, "base point coincides with a branch point");
  base_y_ = std::sqrt(f(base_));
}

Curve Curve::z5(cplx lambda1, double r) {
  if (!(r > 0)) throw Error(ErrorKind::DomainError, "z5 family requires r > 0");
  std::vector<cplx> e{lambda1};
  for (int k = 0; k < 5; ++k) e.push_back(lambda1 + r * r * std::polar(1.0, 2.0 * kPi * k / 5.0));
  return Curve(e);
}

void Curve::init() {
  if (e_.size() != 6) throw Error(ErrorKind::InvalidConfig, "a genus-2 curve needs exactly 6 branch points");
  for (const auto& e : e_)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw Error(ErrorKind::InvalidConfig, "branch points must be finite");
  centroid_ = std::accumulate(e_.begin(), e_.end(), cplx(0)) / 6.0;
  min_gap_ = 1e300;
  diameter_ = 0;
  for (size_t i = 0; i < 6; ++i)
    for (size_t j = i + 1; j < 6; ++j) {
      const double d = std::abs(e_[i] - e_[j]);
      min_gap_ = std::min(min_gap_, d);
      diameter_ = std::max(diameter_, d);
    }
  if (!(min_gap_ > 1e-12 * std::max(1.0, diameter_)))
    throw Error(ErrorKind::DuplicateBranchPoints, "branch points must be pairwise distinct");
}

cplx Curve::f(cplx lambda) const {
  cplx p = 1.0;
  for (const auto& e : e_) p *= lambda - e;
  return p;
}

std::array<cplx, 7> Curve::poly_coeffs(cplx shift) const {
  std::array<cplx, 7> c{};
  c[0] = 1.0;
  int deg = 0;
  for (const auto& e : e_) {
    const cplx r = e - shift;
    for (int k = deg + 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
    ++deg;
  }
  return c;
}

cplx Curve::continue_segment(cplx from, cplx y_from, cplx to) const {
  cplx y = y_from;
  for (const auto& e : e_) y *= std::sqrt((to - e) / (from - e));
  return y;
}

cplx Curve::y_ref(cplx lambda) const { return continue_segment(base_, base_y_, lambda); }

cplx Curve::continue_polyline(const std::vector<cplx>& path, cplx y) const {
  const double tol = 1e-9 * std::max(1.0, diameter_);
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    for (const auto& e : e_)
      if (segment_distance(e, path[k], path[k + 1]) < tol)
        throw Error(ErrorKind::PathTooCloseToBranchPoint, "continuation path passes through a branch point");
    y = continue_segment(path[k], y, path[k + 1]);
  }
  return y;
}

cplx Curve::continue_y(const std::vector<cplx>& path) const {
  if (path.empty() || std::abs(path.front() - base_) > 1e-12 * (1.0 + std::abs(base_)))
    throw Error(ErrorKind::InvalidConfig, "continuation path must start at the base point");
  return continue_polyline(path, base_y_);
}

int Curve::branch_index_of(cplx lambda, double tol) const {
  for (int j = 0; j < 6; ++j)
    if (std::abs(lambda - e_[j]) <= tol * std::max(1.0, diameter_)) return j;
  return -1;
}

SurfacePoint Curve::point(cplx lambda, int sheet) const {
  const int j = branch_index_of(lambda);
  if (j >= 0) return branch(j);
  return {lambda, (sheet >= 0 ? 1.0 : -1.0) * y_ref(lambda), -1};
}

SurfacePoint Curve::branch(int j) const {
  if (j < 0 || j >= 6) throw Error(ErrorKind::NotABranchPoint, "branch index out of range");
  return {e_[j], 0.0, j};
}

SurfacePoint Curve::opposite(const SurfacePoint& p) const {
  if (p.is_branch()) return p;
  return {p.lambda, -p.y, -1};
}

int Curve::sheet(const SurfacePoint& p) const {
  if (p.is_branch()) return 0;
  const cplx r = y_ref(p.lambda);
  return std::abs(p.y - r) <= std::abs(p.y + r) ? 1 : -1;
}

double Curve::path_clearance(const std::vector<cplx>& path, int skip_a, int skip_b) const {
  double m = 1e300;
  for (size_t k = 0; k + 1 < path.size(); ++k)
    for (int j = 0; j < 6; ++j) {
      if ((k == 0 && j == skip_a) || (k + 2 == path.size() && j == skip_b)) continue;
      m = std::min(m, segment_distance(e_[j], path[k], path[k + 1]));
    }
  return m;
}

std::vector<cplx> Curve::surface_path(const SurfacePoint& a, const SurfacePoint& b) const {
  const int ia = a.branch_index, ib = b.branch_index;
  double clear = 0.25 * min_gap_;
  for (int j = 0; j < 6; ++j) {
    if (j != ia) clear = std::min(clear, 0.5 * std::abs(a.lambda - e_[j]));
    if (j != ib) clear = std::min(clear, 0.5 * std::abs(b.lambda - e_[j]));
  }
  // the sheet at the far end is checked by continuing from the non-branch end
  auto acceptable = [&](const std::vector<cplx>& path) {
    if (path_clearance(path, ia, ib) < clear) return false;
    if (a.is_branch() && b.is_branch()) return true;
    if (!a.is_branch() && !b.is_branch()) {
      const cplx y = continue_polyline(path, a.y);
      return std::abs(y - b.y) < std::abs(y + b.y);
    }
    return true;
  };
  std::vector<cplx> direct{a.lambda, b.lambda};
  if (acceptable(direct)) return direct;

  const cplx d = b.lambda - a.lambda;
  const cplx mid = 0.5 * (a.lambda + b.lambda);
  std::vector<int> idx(6);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return segment_distance(e_[i], a.lambda, b.lambda) < segment_distance(e_[j], a.lambda, b.lambda);
  });
  const std::array<double, 4> radii{0.45, 0.7, 1.2, 2.0};
  for (int j : idx) {
    if (j == ia || j == ib) continue;
    const cplx e = e_[j];
    const double L2 = std::norm(d);
    const double t = L2 > 0 ? std::clamp(((e - a.lambda) * std::conj(d)).real() / L2, 0.0, 1.0) : 0.0;
    cplx n = e - (a.lambda + t * d);
    n = std::abs(n) > 1e-12 ? n / std::abs(n) : (L2 > 0 ? kI * d / std::sqrt(L2) : cplx(1.0));
    for (double r : radii)
      for (int k = 0; k < 8; ++k) {
        const cplx c = e + r * min_gap_ * n * std::polar(1.0, kPi * k / 4.0 * (k % 2 ? -1 : 1));
        std::vector<cplx> path{a.lambda, c, b.lambda};
        if (acceptable(path)) return path;
      }
  }
  const cplx perp = std::abs(d) > 0 ? kI * d / std::abs(d) : cplx(0, 1);
  for (double L : {0.5, 1.0, 2.0, 4.0})
    for (int s : {1, -1}) {
      const cplx c = mid + static_cast<double>(s) * L * diameter_ * perp;
      std::vector<cplx> path{a.lambda, c, b.lambda};
      if (acceptable(path)) return path;
      for (int j = 0; j < 6; ++j) {
        std::vector<cplx> p2{a.lambda, c, e_[j] + 0.45 * min_gap_ * perp, b.lambda};
        if (acceptable(p2)) return p2;
      }
    }
  // two waypoints on a circle about one branch point
  for (int j : idx) {
    if (j == ia || j == ib) continue;
    for (double r : radii)
      for (int k1 = 0; k1 < 8; ++k1)
        for (int k2 = 0; k2 < 8; ++k2) {
          if (k1 == k2) continue;
          const cplx c1 = e_[j] + r * min_gap_ * std::polar(1.0, kPi * k1 / 4.0);
          const cplx c2 = e_[j] + r * min_gap_ * std::polar(1.0, kPi * k2 / 4.0);
          std::vector<cplx> path{a.lambda, c1, c2, b.lambda};
          if (acceptable(path)) return path;
        }
  }
  throw Error(ErrorKind::PathTooCloseToBranchPoint, "no admissible surface path found");
}

// ---------------------------------------------------------------------------

CycleBasis::CycleBasis(const Curve& c, std::array<int, 6> order) : order_(order) {
  for (int j = 0; j < 6; ++j) e_[j] = c.branch_point(order[j]);
}

cplx CycleBasis::factor(int k, cplx lambda, const std::array<cplx, 6>& d) const {
  const cplx m = 0.5 * (e_[2 * k] + e_[2 * k + 1]);
  const cplx u = lambda - m;
  return u * std::sqrt(d[2 * k] * d[2 * k + 1] / (u * u));
}

cplx CycleBasis::y_cut(cplx lambda) const {
  std::array<cplx, 6> d;
  for (int j = 0; j < 6; ++j) d[j] = lambda - e_[j];
  return factor(0, lambda, d) * factor(1, lambda, d) * factor(2, lambda, d);
}

namespace {

bool valid_order(const Curve& c, const std::array<int, 6>& o) {
  const double delta = 0.05 * c.min_gap();
  auto E = [&](int i) { return c.branch_point(o[i]); };
  std::array<std::pair<int, int>, 3> cuts{{{0, 1}, {2, 3}, {4, 5}}};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (segment_segment_distance(E(cuts[i].first), E(cuts[i].second), E(cuts[j].first), E(cuts[j].second)) <
          delta)
        return false;
  std::array<std::pair<int, int>, 2> bs{{{1, 4}, {3, 4}}};
  for (const auto& b : bs)
    for (const auto& cu : cuts) {
      const int shared = (b.first == cu.first || b.first == cu.second)     ? b.first
                         : (b.second == cu.first || b.second == cu.second) ? b.second
                                                                           : -1;
      if (shared < 0) {
        if (segment_segment_distance(E(b.first), E(b.second), E(cu.first), E(cu.second)) < delta) return false;
      } else {
        const int bfar = b.first == shared ? b.second : b.first;
        const int cfar = cu.first == shared ? cu.second : cu.first;
        if (segment_distance(E(bfar), E(cu.first), E(cu.second)) < delta) return false;
        if (segment_distance(E(cfar), E(b.first), E(b.second)) < delta) return false;
      }
    }
  return true;
}

}  // namespace

std::array<int, 6> homology_order(const Curve& c, int rotation) {
  std::array<int, 6> base;
  std::iota(base.begin(), base.end(), 0);
  const cplx g = c.centroid();
  auto ang = [&](int j) {
    const cplx d = c.branch_point(j) - g;
    return std::abs(d) < 1e-14 * std::max(1.0, c.diameter()) ? 0.0 : std::atan2(d.imag(), d.real());
  };
  std::stable_sort(base.begin(), base.end(), [&](int i, int j) { return ang(i) < ang(j); });
  std::vector<std::array<int, 6>> valid;
  for (int r = 0; r < 6; ++r) {
    std::array<int, 6> o;
    for (int j = 0; j < 6; ++j) o[j] = base[(j + r) % 6];
    if (valid_order(c, o)) valid.push_back(o);
  }
  if (!valid.empty()) return valid[static_cast<size_t>(((rotation % 6) + 6) % 6) % valid.size()];
  std::array<int, 6> p = base;
  std::sort(p.begin(), p.end());
  int skip = ((rotation % 6) + 6) % 6;
  std::optional<std::array<int, 6>> first;
  do {
    if (valid_order(c, p)) {
      if (!first) first = p;
      if (skip-- == 0) return p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  if (first) return *first;
  throw Error(ErrorKind::IllConditionedA, "no admissible branch-point pairing for the homology basis");
}

double PeriodData::a_normalization_error() const {
  const Eigen::Matrix2cd I = C * A;
  return (I - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Vector2cd PeriodData::v_lambda(cplx lambda, cplx y) const {
  Eigen::Vector2cd w(1.0 / y, lambda / y);
  return C * w;
}

Eigen::Vector2cd PeriodData::v(const SurfacePoint& p) const {
  if (p.is_branch()) throw Error(ErrorKind::DiagonalEvaluation, "v/dλ is singular at a branch point");
  return v_lambda(p.lambda, p.y);
}

double metric_weight(const Curve& c, int cone_point, cplx lambda) {
  return std::norm(lambda - c.branch_point(cone_point)) / std::abs(c.f(lambda));
}

SurfaceGrid metric_grid(const Curve& c, int cone_point, const SurfaceGridConfig& cfg) {
  if (cone_point < 0 || cone_point >= 6) throw Error(ErrorKind::NotABranchPoint, "cone point index out of range");
  return SurfaceGrid(c.branch_points(), [&](cplx z) { return metric_weight(c, cone_point, z); }, cfg);
}

cplx singular_differential(const Curve& c, int cone_point, const SurfacePoint& p) {
  if (cone_point < 0 || cone_point >= 6) throw Error(ErrorKind::NotABranchPoint, "cone point index out of range");
  if (p.is_branch()) {
    if (p.branch_index == cone_point) return 0.0;
    throw Error(ErrorKind::DiagonalEvaluation, "ω/dλ is singular at a branch point other than P");
  }
  return (p.lambda - c.branch_point(cone_point)) / p.y;
}

PeriodData period_data(const Curve& c, int cone_point, const QuadratureConfig& cfg, int rotation) {
  if (cone_point < 0 || cone_point >= 6) throw Error(ErrorKind::NotABranchPoint, "cone point index out of range");
  cfg.validate();
  PeriodData pd;
  pd.cone_point = cone_point;
  pd.cycles = CycleBasis(c, homology_order(c, rotation));
  using V5 = Eigen::Matrix<cplx, 5, 1>;
  auto mono = [](cplx l) {
    V5 v;
    v << 1.0, l, l * l, l * l * l, l * l * l * l;
    return v;
  };
  std::array<V5, 4> raw;
  double err = 0;
  for (int k = 0; k < 4; ++k) {
    auto r = pd.cycles.raw(k, mono, cfg);
    raw[k] = r.value;
    err = std::max(err, r.error);
  }
  pd.period_error = err;
  Eigen::Matrix2cd A;
  A << raw[0](0), raw[1](0), raw[0](1), raw[1](1);
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(A);
  const double cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!(cond < 1e8)) throw Error(ErrorKind::IllConditionedA, "a-period matrix condition number " + std::to_string(cond));
  const Eigen::Matrix2cd C = A.inverse();

  // orientation of the b-cycles fixed by the Riemann bilinear relations
  double best = 1e300;
  std::array<int, 3> choice{1, 1, 0};
  for (int mix : {0, 1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        const V5 b1 = raw[2] * double(s1);
        const V5 b2 = raw[3] * double(s2) + raw[0] * double(mix);
        Eigen::Matrix2cd B;
        B << b1(0), b2(0), b1(1), b2(1);
        const Eigen::Matrix2cd T = C * B;
        const Eigen::Matrix2d im = T.imag();
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (im + im.transpose()));
        if (es.eigenvalues().minCoeff() <= 0) continue;
        const double asym = std::abs(T(0, 1) - T(1, 0)) / T.cwiseAbs().maxCoeff();
        if (asym < best) {
          best = asym;
          choice = {s1, s2, mix};
        }
      }
  pd.cycles.set_orientation(choice[0], choice[1], choice[2]);
  pd.moments.col(0) = raw[0];
  pd.moments.col(1) = raw[1];
  pd.moments.col(2) = raw[2] * double(choice[0]);
  pd.moments.col(3) = raw[3] * double(choice[1]) + raw[0] * double(choice[2]);
  pd.A = A;
  pd.B << pd.moments(0, 2), pd.moments(0, 3), pd.moments(1, 2), pd.moments(1, 3);
  pd.C = C;
  pd.Bmat = C * pd.B;
  pd.ImB = pd.Bmat.imag();
  pd.M = pd.ImB.inverse();

  const SurfaceGrid grid = metric_grid(c, cone_point, cfg.surface_grid);
  pd.area = grid.integrate([](cplx, int) { return 1.0; });
  const cplx lp = c.branch_point(cone_point);
  double bil = 0;
  for (int a = 0; a < 2; ++a) {
    const cplx Aw = pd.moments(1, a) - lp * pd.moments(0, a);
    const cplx Bw = pd.moments(1, a + 2) - lp * pd.moments(0, a + 2);
    bil += (std::conj(Aw) * Bw).imag();
  }
  pd.area_bilinear = bil;
  return pd;
}

LocalExpansion local_expansion(const Curve& c, int p, int N) {
  if (p < 0 || p >= 6) throw Error(ErrorKind::NotABranchPoint, "branch index out of range");
  LocalExpansion le;
  le.p = p;
  const cplx ep = c.branch_point(p);
  le.lambda = Series::constant(ep, N);
  le.lambda[2] = 1.0;
  // s^2 = ∏_{k≠p}(λ_p - λ_k + ζ^2)
  Series s2 = Series::constant(1.0, N);
  cplx s0sq = 1.0;
  for (int k = 0; k < 6; ++k) {
    if (k == p) continue;
    Series t = Series::constant(ep - c.branch_point(k), N);
    t[2] = 1.0;
    s2 = s2 * t;
    s0sq *= ep - c.branch_point(k);
  }
  le.s = s2.root(2, std::sqrt(s0sq));
  const Series inv = le.s.reciprocal();
  le.omega1 = 2.0 * inv;
  le.omega2 = 2.0 * (le.lambda * inv);
  Series z2(N);
  z2[2] = 1.0;
  le.omega = 2.0 * (z2 * inv);
  return le;
}

}  // namespace cone_spectra
