#include "fbflow/grid_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbflow {

Vec EvolveGrid::point(int j) const {
  Vec x = Vec::Zero(dim);
  x(0) = s[j];
  return x;
}

EvolveGrid make_evolve_grid(const DomainSpec& domain) {
  const auto& cfg = domain.config();
  EvolveGrid g;
  g.dim = domain.dim();
  double lo = 0.0, hi = 0.0;
  if (domain.shape() == Shape::Interval) {
    g.kind = GridKind::Interval;
    lo = cfg.lo;
    hi = cfg.hi;
    g.free_lo = cfg.free_lo;
    g.free_hi = cfg.free_hi;
  } else if (domain.shape() == Shape::Disk) {
    g.kind = GridKind::Radial;
    lo = 0.0;
    hi = cfg.radius;
    g.free_lo = false;
    g.free_hi = true;
  } else {
    fail(ErrorCode::InvalidConfig, "evolution runs on interval and disk/ball domains only");
  }
  require(g.free_lo || g.free_hi, ErrorCode::InvalidConfig, "evolution needs at least one free end");
  const int N = std::max(4, static_cast<int>(std::lround((hi - lo) / cfg.grid_spacing)));
  g.x0 = lo;
  g.dx = (hi - lo) / N;
  g.s.resize(N + 1);
  g.distance.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    g.s[j] = (j == N) ? hi : lo + j * g.dx;
    double d = std::numeric_limits<double>::infinity();
    if (g.free_lo) d = std::min(d, g.s[j] - lo);
    if (g.free_hi) d = std::min(d, hi - g.s[j]);
    g.distance[j] = std::max(0.0, d);
  }
  return g;
}

// ----------------------------------------------------------------------------

GridOperator::GridOperator(OperatorSpec spec, EvolveGrid grid, ScalarFieldPtr v)
    : spec_(spec), grid_(std::move(grid)), v_(std::move(v)) {
  require(v_ && v_->dim() == grid_.dim && spec_.dim() == grid_.dim, ErrorCode::InvalidArgument,
          "grid operator: dimensions of operator, grid and profile differ");
  require(grid_.size() >= 5, ErrorCode::InvalidArgument, "grid operator needs at least 5 nodes");
  vjets_.reserve(grid_.size());
  for (int j = 0; j < grid_.size(); ++j) vjets_.push_back(v_->jet(grid_.point(j)));
}

NodeDerivs GridOperator::derivs(const std::vector<double>& h, int j, Stencil st) const {
  const int N = grid_.last();
  const double dx = grid_.dx;
  const bool radial = grid_.kind == GridKind::Radial;
  // Even reflection through r = 0 on radial grids.
  auto at = [&](int k) { return h[radial ? std::abs(k) : k]; };
  NodeDerivs d;
  d.h = h[j];

  const bool lo_end = !radial && j == 0;
  const bool hi_end = j == N;
  if (hi_end) {
    d.hs = (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * dx);
    d.hss = (2.0 * at(j) - 5.0 * at(j - 1) + 4.0 * at(j - 2) - at(j - 3)) / (dx * dx);
    return d;
  }
  if (lo_end) {
    d.hs = (-3.0 * at(j) + 4.0 * at(j + 1) - at(j + 2)) / (2.0 * dx);
    d.hss = (2.0 * at(j) - 5.0 * at(j + 1) + 4.0 * at(j + 2) - at(j + 3)) / (dx * dx);
    return d;
  }
  d.hss = (at(j + 1) - 2.0 * at(j) + at(j - 1)) / (dx * dx);
  if (radial && j == 0) {
    d.hs = 0.0;
    return d;
  }
  const bool back_ok = radial || j >= 2;
  const bool fwd_ok = j + 2 <= N;
  if (st == Stencil::Backward && back_ok)
    d.hs = (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * dx);
  else if (st == Stencil::Backward)
    d.hs = (at(j) - at(j - 1)) / dx;
  else if (st == Stencil::Forward && fwd_ok)
    d.hs = (-3.0 * at(j) + 4.0 * at(j + 1) - at(j + 2)) / (2.0 * dx);
  else if (st == Stencil::Forward)
    d.hs = (at(j + 1) - at(j)) / dx;
  else
    d.hs = (at(j + 1) - at(j - 1)) / (2.0 * dx);
  return d;
}

Jet2 GridOperator::jet(int j, const NodeDerivs& d) const {
  const int n = grid_.dim;
  Jet2 J = Jet2::zero(n);
  J.value = d.h;
  J.grad(0) = d.hs;
  J.hess(0, 0) = d.hss;
  if (grid_.kind == GridKind::Radial) {
    const double r = grid_.s[j];
    for (int k = 1; k < n; ++k) J.hess(k, k) = (r > 0.0) ? d.hs / r : d.hss;
  }
  return J;
}

GEval GridOperator::eval(int j, const NodeDerivs& d) const {
  return transformed_G(spec_, jet(j, d), vjets_[j], grid_.point(j));
}

std::pair<double, double> GridOperator::drift(int j, const NodeDerivs& d, double eps) const {
  NodeDerivs p = d, m = d;
  p.hss += eps;
  m.hss -= eps;
  const double a = (eval(j, p).G - eval(j, m).G) / (2.0 * eps);
  p = d;
  m = d;
  p.hs += eps;
  m.hs -= eps;
  const double b = (eval(j, p).G - eval(j, m).G) / (2.0 * eps);
  return {a, b};
}

Stencil GridOperator::choose(const std::vector<double>& h, int j) const {
  const int N = grid_.last();
  if (j == N) return Stencil::Backward;
  if (j == 0) return grid_.kind == GridKind::Radial ? Stencil::Central : Stencil::Forward;
  const auto [a, b] = drift(j, derivs(h, j, Stencil::Central));
  const double pe = std::abs(b) * grid_.dx / (2.0 * std::max(a, 0.0));
  if (!(pe > 1.0)) return Stencil::Central;
  return b > 0.0 ? Stencil::Forward : Stencil::Backward;
}

double GridOperator::laplacian(const std::vector<double>& h, int j) const {
  const NodeDerivs d = derivs(h, j, Stencil::Central);
  if (grid_.kind != GridKind::Radial) return d.hss;
  const double r = grid_.s[j];
  return r > 0.0 ? d.hss + (grid_.dim - 1) * d.hs / r : grid_.dim * d.hss;
}

}  // namespace fbflow
