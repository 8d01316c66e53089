#include "fbflow/evolve.hpp"
#include "fbflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbflow {

namespace {

void check_grid(const DirectGrid& g) {
  require(g.size >= 5 && g.dx > 0.0, ErrorCode::InvalidArgument, "direct grid needs >= 5 nodes and dx > 0");
  require(!g.radial || g.x0 == 0.0, ErrorCode::InvalidArgument, "radial grids start at r = 0");
  require(g.dim >= 1 && g.dim <= kMaxDim, ErrorCode::InvalidArgument, "direct grid: bad dimension");
}

/// Value at index k with even reflection at r = 0 and linear extrapolation
/// past the other ends.
double ghost(const DirectGrid& g, const std::vector<double>& v, int k) {
  const int N = g.size - 1;
  if (k < 0) return g.radial ? v[-k] : 2.0 * v[0] - v[1];
  if (k > N) return 2.0 * v[N] - v[N - 1];
  return v[k];
}

double dt_limit(double c_par, double c_adv, double dx, double a, double b) {
  double dt = std::numeric_limits<double>::infinity();
  if (a > 0.0) dt = std::min(dt, c_par * dx * dx / a);
  if (b > 0.0) dt = std::min(dt, c_adv * dx / b);
  return dt;
}

}  // namespace

// ----------------------------------------------------------------------------

PLapPressureSolver::PLapPressureSolver(DirectGrid grid, double p, DirectOptions opt) : grid_(grid), p_(p), opt_(opt) {
  check_grid(grid_);
  require(p > 2.0, ErrorCode::InvalidArgument, "p-Laplacian needs p > 2");
}

double PLapPressureSolver::stable_dt(const DirectState& s) const {
  const double c = (p_ - 2.0) / (p_ - 1.0);
  double a = 0.0, b = 0.0;
  for (int j = 0; j < grid_.size; ++j) {
    const double gx = (ghost(grid_, s.values, j + 1) - ghost(grid_, s.values, j - 1)) / (2.0 * grid_.dx);
    const double up = std::max(std::abs(ghost(grid_, s.values, j + 1) - s.values[j]),
                               std::abs(s.values[j] - ghost(grid_, s.values, j - 1))) / grid_.dx;
    const double mag = std::max(std::abs(gx), up);
    a = std::max(a, c * s.values[j] * (p_ - 1.0) * std::pow(mag, p_ - 2.0));
    double drift = p_ * std::pow(mag, p_ - 1.0);
    const double r = grid_.s(j);
    if (grid_.radial && r > 0.0) drift += c * s.values[j] * (grid_.dim - 1) * std::pow(mag, p_ - 2.0) / r;
    b = std::max(b, drift);
  }
  return dt_limit(opt_.c_par, opt_.c_adv, grid_.dx, a, b);
}

DirectState PLapPressureSolver::step(const DirectState& s, double dt) const {
  const double c = (p_ - 2.0) / (p_ - 1.0);
  const double dx = grid_.dx;
  DirectState out = s;
  out.t = s.t + dt;
  for (int j = 0; j < grid_.size; ++j) {
    const double g = s.values[j];
    const double gm = ghost(grid_, s.values, j - 1), gp = ghost(grid_, s.values, j + 1);
    const double Dm = (g - gm) / dx, Dp = (gp - g) / dx;
    // Godunov value of |g_x|^2 for g_t = |g_x|^p.
    const double grad2 = std::max(std::pow(std::min(Dm, 0.0), 2), std::pow(std::max(Dp, 0.0), 2));
    double rhs = std::pow(grad2, 0.5 * p_);
    if (g > 0.0) {
      const double gx = (gp - gm) / (2.0 * dx);
      const double gxx = (gp - 2.0 * g + gm) / (dx * dx);
      const double w = std::pow(std::abs(gx), p_ - 2.0);
      double lap = (p_ - 1.0) * gxx;
      const double r = grid_.s(j);
      if (grid_.radial) lap += (r > 0.0) ? (grid_.dim - 1) * gx / r : (grid_.dim - 1) * gxx;
      rhs += c * g * w * lap;
    }
    double v = g + dt * rhs;
    if (v < 0.0) {
      v = 0.0;
      out.clamped = true;
    }
    out.values[j] = v;
  }
  return out;
}

double PLapPressureSolver::front(const DirectState& s) const {
  // Same resolved-profile rule as GcfRadialSolver::flat_radius, scanning
  // outward from the positive side.
  const auto& g = s.values;
  if (!(g[0] > 0.0)) return grid_.s(0);
  int k = 0;
  for (int j = 1; j < grid_.size; ++j) {
    if (g[j] <= 0.0 || g[j] < 0.5 * (g[j - 1] - g[j])) break;
    k = j;
  }
  if (k == 0) return grid_.s(0);
  const double slope = (g[k - 1] - g[k]) / grid_.dx;
  if (!(slope > 0.0)) return grid_.s(k);
  return grid_.s(k) + g[k] / slope;
}

// ----------------------------------------------------------------------------

PLapUFormSolver::PLapUFormSolver(DirectGrid grid, double p, DirectOptions opt) : grid_(grid), p_(p), opt_(opt) {
  check_grid(grid_);
  require(p > 2.0, ErrorCode::InvalidArgument, "p-Laplacian needs p > 2");
}

double PLapUFormSolver::stable_dt(const DirectState& s) const {
  double a = 0.0;
  for (int j = 0; j + 1 < grid_.size; ++j) {
    const double du = std::abs(s.values[j + 1] - s.values[j]) / grid_.dx;
    a = std::max(a, (p_ - 1.0) * std::pow(du, p_ - 2.0));
  }
  return dt_limit(opt_.c_par, opt_.c_adv, grid_.dx, a, 0.0);
}

namespace {

/// Face weight r^{n-1} at the face between j and j+1, and the cell volume
/// (up to the sphere area) of node j.
double face_weight(const DirectGrid& g, int j) {
  if (!g.radial) return 1.0;
  return std::pow(g.s(j) + 0.5 * g.dx, g.dim - 1);
}

double cell_volume(const DirectGrid& g, int j) {
  if (!g.radial) return g.dx;
  const int n = g.dim;
  const double hi = g.s(j) + 0.5 * g.dx;
  const double lo = std::max(0.0, g.s(j) - 0.5 * g.dx);
  return (std::pow(hi, n) - std::pow(lo, n)) / n;
}

}  // namespace

DirectState PLapUFormSolver::step(const DirectState& s, double dt) const {
  const int N = grid_.size - 1;
  std::vector<double> flux(grid_.size, 0.0);  // flux[j]: face between j and j+1
  for (int j = 0; j < N; ++j) {
    const double du = (s.values[j + 1] - s.values[j]) / grid_.dx;
    flux[j] = face_weight(grid_, j) * std::pow(std::abs(du), p_ - 2.0) * du;
  }
  DirectState out = s;
  out.t = s.t + dt;
  for (int j = 0; j <= N; ++j) {
    const double right = j < N ? flux[j] : 0.0;
    const double left = j > 0 ? flux[j - 1] : 0.0;
    double v = s.values[j] + dt * (right - left) / cell_volume(grid_, j);
    if (v < 0.0) {
      v = 0.0;
      out.clamped = true;
    }
    out.values[j] = v;
  }
  return out;
}

double PLapUFormSolver::mass(const DirectState& s) const {
  double m = 0.0;
  for (int j = 0; j < grid_.size; ++j) m += cell_volume(grid_, j) * s.values[j];
  if (grid_.radial) m *= 2.0 * std::pow(M_PI, 0.5 * grid_.dim) / std::tgamma(0.5 * grid_.dim);
  return m;
}

double PLapUFormSolver::front(const DirectState& s) const {
  const double e = (p_ - 2.0) / (p_ - 1.0), k = (p_ - 1.0) / (p_ - 2.0);
  auto g = [&](int j) { return k * std::pow(std::max(s.values[j], 0.0), e); };
  for (int j = grid_.size - 1; j >= 1; --j) {
    if (s.values[j] > 0.0) {
      const double g1 = g(j), g0 = g(j - 1);
      if (g0 > g1) return grid_.s(j) + g1 * grid_.dx / (g0 - g1);
      return grid_.s(j);
    }
  }
  return grid_.s(0);
}

// ----------------------------------------------------------------------------

GcfRadialSolver::GcfRadialSolver(DirectGrid grid, double alpha, DirectOptions opt)
    : grid_(grid), alpha_(alpha), opt_(opt) {
  check_grid(grid_);
  require(grid_.radial && grid_.dim == 2, ErrorCode::InvalidArgument, "radial Gauss flow solver is for n = 2");
  validate_gauss_parameters(2, alpha);
}

namespace {

struct RadialJet {
  Mat A;
  Vec p;
  double u;
};

RadialJet gcf_jet(const DirectGrid& grid, const std::vector<double>& g, int j) {
  const int N = grid.size - 1;
  const double dx = grid.dx;
  const double r = grid.s(j);
  RadialJet J;
  J.A = Mat::Zero(2, 2);
  J.p = Vec::Zero(2);
  J.u = g[j];
  double gx, gxx;
  if (j == N) {
    gx = (g[N] - g[N - 1]) / dx;
    gxx = (g[N] - 2.0 * g[N - 1] + g[N - 2]) / (dx * dx);
  } else {
    // Forward difference: the drift carries information inward.
    gx = (j == 0) ? 0.0 : (g[j + 1] - g[j]) / dx;
    gxx = (g[j + 1] - 2.0 * g[j] + ghost(grid, g, j - 1)) / (dx * dx);
  }
  J.p(0) = gx;
  J.A(0, 0) = gxx;
  J.A(1, 1) = (r > 0.0) ? gx / r : gxx;
  return J;
}

}  // namespace

double GcfRadialSolver::rhs(const DirectState& s, int j) const {
  const auto F = OperatorSpec::gauss_flow(2, alpha_);
  const RadialJet J = gcf_jet(grid_, s.values, j);
  if (J.u > 0.0 && J.p(0) < -1e-12) {
    std::ostringstream os;
    os << "radial profile decreasing at r = " << grid_.s(j) << " (convexity lost)";
    fail(ErrorCode::Convexity, os.str());
  }
  try {
    return F.eval(J.A, J.p, J.u);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidState) fail(ErrorCode::Convexity, e.what());
    throw;
  }
}

double GcfRadialSolver::stable_dt(const DirectState& s) const {
  const auto F = OperatorSpec::gauss_flow(2, alpha_);
  double a = 0.0, b = 0.0;
  for (int j = 0; j < grid_.size; ++j) {
    const RadialJet J = gcf_jet(grid_, s.values, j);
    if (J.u <= 0.0 && J.p(0) <= 0.0) continue;
    OperatorPartials P;
    try {
      P = F.partials(J.A, J.p, J.u);
    } catch (const Error&) {
      continue;
    }
    const double r = grid_.s(j);
    a = std::max(a, std::abs(P.dA(0, 0)));
    b = std::max(b, std::abs(P.dp(0) + (r > 0.0 ? P.dA(1, 1) / r : 0.0)));
  }
  return dt_limit(opt_.c_par, opt_.c_adv, grid_.dx, a, b);
}

DirectState GcfRadialSolver::step(const DirectState& s, double dt) const {
  const int N = grid_.size - 1;
  DirectState out = s;
  out.t = s.t + dt;
  for (int j = 0; j < N; ++j) {
    double v = s.values[j] + dt * rhs(s, j);
    if (v < 0.0) {
      v = 0.0;
      out.clamped = true;
    }
    out.values[j] = v;
  }
  // Outer edge: quadratic extrapolation (no data enters from outside).
  out.values[N] = 3.0 * out.values[N - 1] - 3.0 * out.values[N - 2] + out.values[N - 3];
  return out;
}

double GcfRadialSolver::flat_radius(const DirectState& s) const {
  // The upwind scheme leaves a thin precursor of tiny values ahead of the
  // front. Nodes count as resolved once g is at least half of the next
  // increment, i.e. half a cell behind the linear profile; the front is the
  // root of the line through the first two resolved nodes.
  const auto& g = s.values;
  const int N = grid_.size - 1;
  int k = -1;
  for (int j = N - 1; j >= 0; --j) {
    if (g[j] <= 0.0 || g[j] < 0.5 * (g[j + 1] - g[j])) break;
    k = j;
  }
  if (k < 0) return grid_.s(N);
  if (k == 0) return 0.0;
  const double slope = (g[k + 1] - g[k]) / grid_.dx;
  if (!(slope > 0.0)) return grid_.s(k);
  return std::clamp(grid_.s(k) - g[k] / slope, 0.0, grid_.s(k));
}

}  // namespace fbflow
