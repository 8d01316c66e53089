#include "fbflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fbflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  const double d1 = cross2(p2 - p1, q1 - p1);
  const double d2 = cross2(p2 - p1, q2 - p1);
  const double d3 = cross2(q2 - q1, p1 - q1);
  const double d4 = cross2(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

std::vector<Eigen::Vector2d> read_spline_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open spline file '" + path + "'");
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidConfig, "spline file is empty");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  require(line == "x1,x2", ErrorCode::InvalidConfig,
          "spline file header must be 'x1,x2' for a planar boundary, got '" + line + "'");
  std::vector<Eigen::Vector2d> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double x, y;
    std::string extra;
    if (!(is >> x >> y) || (is >> extra))
      fail(ErrorCode::InvalidConfig, "spline file line " + std::to_string(lineno) + ": expected two numbers");
    pts.emplace_back(x, y);
  }
  return pts;
}

}  // namespace

Shape parse_shape(const std::string& s) {
  if (s == "disk") return Shape::Disk;
  if (s == "ellipse") return Shape::Ellipse;
  if (s == "interval") return Shape::Interval;
  if (s == "spline-file") return Shape::Spline;
  fail(ErrorCode::InvalidConfig, "unknown shape '" + s + "' (disk | ellipse | interval | spline-file)");
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::Disk: return "disk";
    case Shape::Ellipse: return "ellipse";
    case Shape::Interval: return "interval";
    case Shape::Spline: return "spline-file";
  }
  return "?";
}

std::array<Eigen::Vector2d, 3> DomainSpec::curve(double t) const {
  std::array<Eigen::Vector2d, 3> P;
  const double c = std::cos(t), s = std::sin(t);
  switch (cfg_.shape) {
    case Shape::Disk: {
      const double r = cfg_.radius;
      P[0] = {r * c, r * s};
      P[1] = {-r * s, r * c};
      P[2] = {-r * c, -r * s};
      return P;
    }
    case Shape::Ellipse: {
      const double a = cfg_.semi_axes[0], b = cfg_.semi_axes[1];
      P[0] = {a * c, b * s};
      P[1] = {-a * s, b * c};
      P[2] = {-a * c, -b * s};
      return P;
    }
    case Shape::Spline: {
      P[0] = {fx0_, fy0_};
      P[1] = {0, 0};
      P[2] = {0, 0};
      for (std::size_t m = 1; m < fx_cos_.size(); ++m) {
        const double md = static_cast<double>(m);
        const double cm = std::cos(md * t), sm = std::sin(md * t);
        P[0] += Eigen::Vector2d(fx_cos_[m] * cm + fx_sin_[m] * sm, fy_cos_[m] * cm + fy_sin_[m] * sm);
        P[1] += md * Eigen::Vector2d(-fx_cos_[m] * sm + fx_sin_[m] * cm, -fy_cos_[m] * sm + fy_sin_[m] * cm);
        P[2] -= md * md * Eigen::Vector2d(fx_cos_[m] * cm + fx_sin_[m] * sm, fy_cos_[m] * cm + fy_sin_[m] * sm);
      }
      return P;
    }
    case Shape::Interval: break;
  }
  fail(ErrorCode::InvalidArgument, "curve() needs a planar closed boundary");
}

double DomainSpec::curve_curvature(double t) const {
  const auto P = curve(t);
  return cross2(P[1], P[2]) / std::pow(P[1].norm(), 3);
}

Projection DomainSpec::project(const Vec& x) const {
  require(x.size() == dim(), ErrorCode::InvalidArgument, "projection: dimension mismatch");
  Projection pr;
  const int n = dim();
  if (cfg_.shape == Shape::Interval) {
    const double dhi = x(0) - cfg_.hi, dlo = cfg_.lo - x(0);
    bool use_hi = cfg_.free_hi;
    if (cfg_.free_hi && cfg_.free_lo) use_hi = dhi >= dlo;
    pr.foot = Vec::Constant(1, use_hi ? cfg_.hi : cfg_.lo);
    pr.normal = Vec::Constant(1, use_hi ? 1.0 : -1.0);
    pr.signed_distance = use_hi ? dhi : dlo;
    return pr;
  }
  if (cfg_.shape == Shape::Disk) {
    const double r = x.norm();
    pr.normal = r > 0 ? Vec(x / r) : unit(n, 0);
    pr.foot = cfg_.radius * pr.normal;
    pr.signed_distance = r - cfg_.radius;
    pr.curvature = 1.0 / cfg_.radius;
    return pr;
  }
  // Closed planar curve: nearest dense sample, then Newton on |P(t) - x|^2.
  const Eigen::Vector2d y(x(0), x(1));
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dense_.size(); ++k) {
    const double d = (dense_[k] - y).squaredNorm();
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  const double dt = kTwoPi / static_cast<double>(dense_.size());
  double t = dense_theta_[best];
  for (int it = 0; it < 50; ++it) {
    const auto P = curve(t);
    const Eigen::Vector2d d = P[0] - y;
    const double g = d.dot(P[1]);
    double H = P[1].squaredNorm() + d.dot(P[2]);
    if (H <= 0) H = P[1].squaredNorm();
    const double step = std::clamp(-g / H, -dt, dt);
    t += step;
    if (std::abs(step) < 1e-15) break;
  }
  const auto P = curve(t);
  const Eigen::Vector2d nrm = Eigen::Vector2d(P[1].y(), -P[1].x()).normalized();
  const double dist = (y - P[0]).norm();
  // Crossing-number inside test on the dense polyline.
  bool inside = false;
  for (std::size_t i = 0, j = dense_.size() - 1; i < dense_.size(); j = i++) {
    const auto& a = dense_[i];
    const auto& b = dense_[j];
    if (((a.y() > y.y()) != (b.y() > y.y())) && (y.x() < (b.x() - a.x()) * (y.y() - a.y()) / (b.y() - a.y()) + a.x()))
      inside = !inside;
  }
  if (dist < 1e-3 * dt * P[1].norm()) inside = (y - P[0]).dot(nrm) < 0;
  pr.foot = Vec(Eigen::Vector2d(P[0]));
  pr.normal = Vec(nrm);
  pr.curvature = cross2(P[1], P[2]) / std::pow(P[1].norm(), 3);
  pr.signed_distance = inside ? -dist : dist;
  return pr;
}

double DomainSpec::signed_distance(const Vec& x) const { return project(x).signed_distance; }

// ----------------------------------------------------------------------------

Mat adapted_frame(const Vec& normal, const Mat* tangential_hessian) {
  const int n = static_cast<int>(normal.size());
  require(n >= 1 && n <= kMaxDim, ErrorCode::InvalidArgument, "adapted frame: dimension 1..4");
  require(std::abs(normal.norm() - 1.0) < 1e-10, ErrorCode::InvalidArgument, "adapted frame: normal must be a unit vector");
  const Vec en = unit(n, n - 1);
  const double c = normal.dot(en);
  Mat R;
  if (c < -1.0 + 1e-12) {
    const Vec w = (normal - en).normalized();
    R = Mat::Identity(n, n) - 2.0 * w * w.transpose();
  } else {
    const Mat W = en * normal.transpose() - normal * en.transpose();
    R = Mat::Identity(n, n) + W + (W * W) / (1.0 + c);
  }
  if (tangential_hessian && n >= 2) {
    require(tangential_hessian->rows() == n - 1 && tangential_hessian->cols() == n - 1, ErrorCode::InvalidArgument,
            "adapted frame: tangential Hessian must be (n-1)x(n-1)");
    const Eigen::MatrixXd K = -Eigen::MatrixXd(*tangential_hessian);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
    const Eigen::VectorXd lam = es.eigenvalues();
    std::vector<int> order(n - 1);
    for (int i = 0; i < n - 1; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lam(a) > lam(b); });
    Mat Q = Mat::Identity(n, n);
    for (int col = 0; col < n - 1; ++col) {
      Eigen::VectorXd q = es.eigenvectors().col(order[col]);
      for (int k = 0; k < n - 1; ++k) {
        if (std::abs(q(k)) > 1e-14) {
          if (q(k) < 0) q = -q;
          break;
        }
      }
      Q.block(0, col, n - 1, 1) = q;
    }
    R = (Q.transpose() * R).eval();
  }
  return R;
}

Mat adapted_frame(const DomainSpec& domain, const BoundaryNode& node) {
  const int n = domain.dim();
  if (n <= 2) return adapted_frame(node.normal);
  // Balls are the only n >= 3 shape: rho_ij = -(1/r) delta_ij.
  const Mat H = -(1.0 / domain.config().radius) * Mat::Identity(n - 1, n - 1);
  return adapted_frame(node.normal, &H);
}

// ----------------------------------------------------------------------------

DomainSpec build_domain(const DomainConfig& cfg_in) {
  DomainConfig cfg = cfg_in;
  require(cfg.dimension >= 1 && cfg.dimension <= kMaxDim, ErrorCode::InvalidConfig, "dimension must be in 1..4");
  require(cfg.grid_spacing > 0.0 && std::isfinite(cfg.grid_spacing), ErrorCode::InvalidConfig,
          "grid_spacing must be positive");
  if (cfg.dimension == 1 && cfg.shape == Shape::Disk) {
    cfg.shape = Shape::Interval;
    cfg.lo = -cfg.radius;
    cfg.hi = cfg.radius;
    cfg.free_lo = cfg.free_hi = true;
  }
  DomainSpec d;
  d.collar_ = cfg.collar_width > 0.0 ? cfg.collar_width : 10.0 * cfg.grid_spacing;
  const int n = cfg.dimension;

  if (cfg.shape == Shape::Interval) {
    require(n == 1, ErrorCode::InvalidConfig, "interval shape requires dimension = 1");
    require(cfg.lo < cfg.hi, ErrorCode::InvalidConfig, "interval: lo must be below hi (non-closed boundary)");
    require(cfg.free_lo || cfg.free_hi, ErrorCode::InvalidConfig, "interval: at least one free end required");
    const double span = (cfg.free_lo && cfg.free_hi) ? 0.5 * (cfg.hi - cfg.lo) : cfg.hi - cfg.lo;
    require(d.collar_ < span, ErrorCode::InvalidConfig, "collar_width leaves no interior (eta too large)");
    d.cfg_ = cfg;
    auto add = [&](double x, double nu, double idx) {
      BoundaryNode b;
      b.x = Vec::Constant(1, x);
      b.normal = Vec::Constant(1, nu);
      b.frame = adapted_frame(b.normal);
      b.param = idx;
      d.nodes_.push_back(b);
    };
    if (cfg.free_lo) add(cfg.lo, -1.0, 0.0);
    if (cfg.free_hi) add(cfg.hi, 1.0, 1.0);
    return d;
  }

  if (cfg.shape == Shape::Disk) {
    require(n <= 3, ErrorCode::InvalidConfig, "disk shape supports dimension 1..3");
    require(cfg.radius > 0.0, ErrorCode::InvalidConfig, "disk radius must be positive");
    require(d.collar_ < cfg.radius, ErrorCode::InvalidConfig, "collar_width leaves no interior (eta too large)");
    d.cfg_ = cfg;
    const double r = cfg.radius;
    if (n == 3) {
      int N = cfg.boundary_nodes > 0 ? cfg.boundary_nodes
                                     : static_cast<int>(std::ceil(4.0 * std::numbers::pi * r * r /
                                                                  (cfg.grid_spacing * cfg.grid_spacing)));
      N = std::max(N, 8);
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < N; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / N;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        BoundaryNode b;
        b.normal = Vec(Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z));
        b.x = r * b.normal;
        b.curvatures = {1.0 / r, 1.0 / r};
        b.param = k;
        b.frame = adapted_frame(d, b);
        d.nodes_.push_back(b);
      }
      return d;
    }
  }

  // Planar closed curves.
  require(n == 2, ErrorCode::InvalidConfig, std::string(to_string(cfg.shape)) + " shape requires dimension = 2");
  if (cfg.shape == Shape::Ellipse) {
    require(cfg.semi_axes.size() == 2 && cfg.semi_axes[0] > 0 && cfg.semi_axes[1] > 0, ErrorCode::InvalidConfig,
            "ellipse needs two positive semi_axes");
    require(d.collar_ < std::min(cfg.semi_axes[0], cfg.semi_axes[1]), ErrorCode::InvalidConfig,
            "collar_width leaves no interior (eta too large)");
  }
  d.cfg_ = cfg;
  if (cfg.shape == Shape::Spline) {
    auto pts = read_spline_csv(cfg.spline_file);
    if (pts.size() >= 2 && (pts.front() - pts.back()).norm() < 1e-12) pts.pop_back();
    require(pts.size() >= 8, ErrorCode::InvalidConfig, "spline boundary needs at least 8 distinct points");
    const std::size_t M = pts.size();
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = i + 2; j < M; ++j) {
        if (i == 0 && j == M - 1) continue;
        if (segments_cross(pts[i], pts[(i + 1) % M], pts[j], pts[(j + 1) % M]))
          fail(ErrorCode::InvalidConfig, "spline boundary is self-intersecting");
      }
    double area = 0.0;
    for (std::size_t i = 0; i < M; ++i) area += cross2(pts[i], pts[(i + 1) % M]);
    require(std::abs(area) > 0.0, ErrorCode::InvalidConfig, "spline boundary encloses no area");
    if (area < 0) std::reverse(pts.begin(), pts.end());
    // Trigonometric interpolation at t_k = 2 pi k / M.
    const std::size_t K = M / 2;
    d.fx_cos_.assign(K + 1, 0.0);
    d.fx_sin_.assign(K + 1, 0.0);
    d.fy_cos_.assign(K + 1, 0.0);
    d.fy_sin_.assign(K + 1, 0.0);
    for (std::size_t m = 0; m <= K; ++m) {
      double ac = 0, as = 0, bc = 0, bs = 0;
      for (std::size_t k = 0; k < M; ++k) {
        const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(M);
        const double cm = std::cos(static_cast<double>(m) * t), sm = std::sin(static_cast<double>(m) * t);
        ac += pts[k].x() * cm;
        as += pts[k].x() * sm;
        bc += pts[k].y() * cm;
        bs += pts[k].y() * sm;
      }
      double w = 2.0 / static_cast<double>(M);
      if (m == 0 || (M % 2 == 0 && m == K)) w *= 0.5;
      d.fx_cos_[m] = w * ac;
      d.fx_sin_[m] = w * as;
      d.fy_cos_[m] = w * bc;
      d.fy_sin_[m] = w * bs;
    }
    d.fx0_ = d.fx_cos_[0];
    d.fy0_ = d.fy_cos_[0];
  }

  // Dense polyline and perimeter.
  const std::size_t dense_n = 4096;
  d.dense_.resize(dense_n);
  d.dense_theta_.resize(dense_n);
  double perimeter = 0.0;
  for (std::size_t k = 0; k < dense_n; ++k) {
    const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(dense_n);
    d.dense_theta_[k] = t;
    d.dense_[k] = d.curve(t)[0];
    if (k > 0) perimeter += (d.dense_[k] - d.dense_[k - 1]).norm();
  }
  perimeter += (d.dense_.front() - d.dense_.back()).norm();
  if (cfg.shape == Shape::Spline) {
    for (std::size_t i = 0; i < dense_n; i += 8)
      for (std::size_t j = i + 16; j < dense_n; j += 8) {
        if (i == 0 && j + 8 >= dense_n) continue;
        if (segments_cross(d.dense_[i], d.dense_[(i + 8) % dense_n], d.dense_[j], d.dense_[(j + 8) % dense_n]))
          fail(ErrorCode::InvalidConfig, "interpolated spline boundary is self-intersecting");
      }
  }
  if (cfg.strongly_convex) {
    for (std::size_t k = 0; k < dense_n; ++k) {
      const double kap = d.curve_curvature(d.dense_theta_[k]);
      if (!(kap > 0.0)) {
        std::ostringstream os;
        os << "boundary not strongly convex: principal curvature " << kap << " at (" << d.dense_[k].x() << ", "
           << d.dense_[k].y() << ")";
        fail(ErrorCode::InvalidConfig, os.str());
      }
    }
  }

  int N = cfg.boundary_nodes > 0 ? cfg.boundary_nodes : static_cast<int>(std::ceil(perimeter / cfg.grid_spacing));
  N = std::max(N, 8);
  // Nodes equally spaced in the curve parameter; refine until the arc gap is
  // within grid_spacing unless the count was fixed.
  for (;;) {
    double gap = 0.0;
    for (int k = 0; k < N; ++k) {
      const double t0 = kTwoPi * k / N, t1 = kTwoPi * (k + 1) / N;
      gap = std::max(gap, (d.curve(t1)[0] - d.curve(t0)[0]).norm());
    }
    if (cfg.boundary_nodes > 0 || gap <= cfg.grid_spacing) break;
    N = static_cast<int>(std::ceil(N * gap / cfg.grid_spacing)) + 1;
  }
  for (int k = 0; k < N; ++k) {
    const double t = kTwoPi * k / N;
    const auto P = d.curve(t);
    BoundaryNode b;
    b.x = Vec(Eigen::Vector2d(P[0]));
    b.normal = Vec(Eigen::Vector2d(P[1].y(), -P[1].x()).normalized());
    b.curvatures = {d.curve_curvature(t)};
    b.param = t;
    b.frame = adapted_frame(d, b);
    d.nodes_.push_back(b);
  }
  return d;
}

// ----------------------------------------------------------------------------

namespace {

std::pair<Vec, Vec> bounding_box(const DomainSpec& d) {
  const int n = d.dim();
  const auto& c = d.config();
  switch (d.shape()) {
    case Shape::Interval: return {Vec::Constant(1, c.lo), Vec::Constant(1, c.hi)};
    case Shape::Disk: return {Vec::Constant(n, -c.radius), Vec::Constant(n, c.radius)};
    case Shape::Ellipse:
      return {Vec(Eigen::Vector2d(-c.semi_axes[0], -c.semi_axes[1])),
              Vec(Eigen::Vector2d(c.semi_axes[0], c.semi_axes[1]))};
    case Shape::Spline: {
      Vec lo = Vec::Constant(2, 1e300), hi = Vec::Constant(2, -1e300);
      for (int k = 0; k < 2048; ++k) {
        const auto p = d.curve(kTwoPi * k / 2048.0)[0];
        lo = lo.cwiseMin(Vec(Eigen::Vector2d(p)));
        hi = hi.cwiseMax(Vec(Eigen::Vector2d(p)));
      }
      return {lo, hi};
    }
  }
  return {Vec(), Vec()};
}

template <class F>
void for_each_grid_node(const DomainSpec& d, double h, F&& f) {
  const auto [lo, hi] = bounding_box(d);
  const int n = d.dim();
  std::array<long, kMaxDim> count{};
  for (int i = 0; i < n; ++i) count[i] = static_cast<long>(std::floor((hi(i) - lo(i)) / h + 1e-9)) + 1;
  std::array<long, kMaxDim> idx{};
  Vec x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) x(i) = lo(i) + h * static_cast<double>(idx[i]);
    f(x);
    int k = 0;
    while (k < n && ++idx[k] == count[k]) idx[k++] = 0;
    if (k == n) break;
  }
}

}  // namespace

CollarGrid build_collar(const DomainSpec& d) {
  CollarGrid g;
  g.eta = d.collar_width();
  g.spacing = d.grid_spacing();
  const double h = g.spacing;
  for_each_grid_node(d, h, [&](const Vec& x) {
    const double sd = d.signed_distance(x);
    if (sd > 1e-12 || sd < -g.eta - 1e-12) return;
    CollarNode c;
    c.x = x;
    c.distance = std::max(0.0, -sd);
    if (c.distance < h) c.flag = CollarNode::BoundaryAdjacent;
    else if (c.distance > g.eta - h) c.flag = CollarNode::OuterEdge;
    g.nodes.push_back(c);
  });
  return g;
}

// ----------------------------------------------------------------------------

Jet2 DistanceProfile::jet2(const Vec& x) const {
  const int n = dim();
  const Projection pr = domain_.project(x);
  Jet2 j = Jet2::zero(n);
  j.value = -scale_ * pr.signed_distance;
  j.grad = -scale_ * pr.normal;
  if (n == 2) {
    const Vec tau = Vec(Eigen::Vector2d(-pr.normal(1), pr.normal(0)));
    const double denom = 1.0 + pr.curvature * pr.signed_distance;
    require(denom > 0.0, ErrorCode::InvalidState, "distance profile evaluated beyond the focal set");
    j.hess = -scale_ * pr.curvature / denom * tau * tau.transpose();
  }
  return j;
}

Jet3 DistanceProfile::jet(const Vec& x) const {
  const int n = dim();
  if (domain_.shape() == Shape::Disk && n >= 2) {
    const double r = domain_.config().radius;
    return radial_jet(x, {scale_ * (r - x.norm()), -scale_, 0.0, 0.0});
  }
  Jet3 j = Jet3::zero(n);
  static_cast<Jet2&>(j) = jet2(x);
  if (n == 1) return j;
  const double h = 1e-3 * std::max(domain_.grid_spacing(), 1e-3);
  for (int k = 0; k < n; ++k) {
    const Vec e = unit(n, k);
    const Mat Hp2 = jet2(x + 2 * h * e).hess, Hp1 = jet2(x + h * e).hess;
    const Mat Hm1 = jet2(x - h * e).hess, Hm2 = jet2(x - 2 * h * e).hess;
    j.third[k] = (-Hp2 + 8.0 * Hp1 - 8.0 * Hm1 + Hm2) / (12.0 * h);
  }
  return j;
}

// ----------------------------------------------------------------------------

NondegeneracyReport check_nondegeneracy(const ScalarField& v, const DomainSpec& d, double c) {
  require(v.dim() == d.dim(), ErrorCode::InvalidArgument, "nondegeneracy: dimension mismatch");
  NondegeneracyReport rep;
  rep.threshold = c;
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.min_boundary_slope = std::numeric_limits<double>::infinity();
  // Cap the interior sample at roughly 2e5 nodes.
  const auto [lo, hi] = bounding_box(d);
  double vol = 1.0;
  for (int i = 0; i < d.dim(); ++i) vol *= (hi(i) - lo(i));
  double h = d.grid_spacing();
  while (vol / std::pow(h, d.dim()) > 2e5) h *= 1.5;
  for_each_grid_node(d, h, [&](const Vec& x) {
    if (d.signed_distance(x) > 0.0) return;
    const Jet3 j = v.jet(x);
    const double m = j.value + j.grad.squaredNorm();
    rep.min_margin = std::min(rep.min_margin, m);
    if (m < c) rep.failures.push_back(x);
  });
  for (const auto& b : d.nodes()) {
    const Jet3 j = v.jet(b.x);
    const double m = j.value + j.grad.squaredNorm();
    const double slope = j.grad.norm();
    rep.min_margin = std::min(rep.min_margin, m);
    rep.min_boundary_slope = std::min(rep.min_boundary_slope, slope);
    if (m < c || slope < c) rep.failures.push_back(b.x);
  }
  rep.pass = rep.min_margin >= c && rep.min_boundary_slope >= c;
  return rep;
}

}  // namespace fbflow
