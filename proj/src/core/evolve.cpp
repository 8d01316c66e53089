#include "fbflow/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbflow {

FixedDomainSolver::FixedDomainSolver(std::shared_ptr<const ExtendedOperator> op, EvolveOptions opt)
    : op_(std::move(op)), opt_(opt) {
  require(op_ != nullptr, ErrorCode::InvalidArgument, "solver needs an operator");
  require(opt_.c_par > 0.0 && opt_.c_adv > 0.0, ErrorCode::InvalidConfig, "CFL constants must be positive");
  require(opt_.final_time >= 0.0, ErrorCode::InvalidConfig, "final time must be non-negative");
  require(opt_.snapshots >= 1, ErrorCode::InvalidConfig, "need at least one snapshot interval");
}

EvolutionState FixedDomainSolver::init(std::vector<double> h0) const {
  require(static_cast<int>(h0.size()) == op_->base().grid().size(), ErrorCode::InvalidArgument,
          "initial field does not match the grid");
  EvolutionState s;
  s.h = std::move(h0);
  s.dt = stable_dt(s);
  return s;
}

double FixedDomainSolver::stable_dt(EvolutionState& s) const {
  const GridOperator& G = op_->base();
  const auto& grid = G.grid();
  double amax = 0.0, bmax = 0.0, det = std::numeric_limits<double>::infinity();
  const auto st = op_->stencils(s.h);
  for (int j = 0; j < grid.size(); ++j) {
    if (op_->in_collar(j)) det = std::min(det, std::abs(G.eval(j, G.derivs(s.h, j, st[j])).pf.T.det_phi));
    const auto [a, b] = op_->coefficients(s.h, j, st[j]);
    amax = std::max(amax, a);
    bmax = std::max(bmax, std::abs(b));
  }
  s.max_a = amax;
  s.max_b = bmax;
  s.min_det_phi = det;
  const double dx = grid.dx;
  double dt = std::numeric_limits<double>::infinity();
  if (amax > 0.0) dt = std::min(dt, opt_.c_par * dx * dx / amax);
  if (bmax > 0.0) dt = std::min(dt, opt_.c_adv * dx / bmax);
  return dt;
}

namespace {

void check_finite(const std::vector<double>& h, double t) {
  for (std::size_t j = 0; j < h.size(); ++j)
    if (!std::isfinite(h[j])) {
      std::ostringstream os;
      os << "non-finite h at node " << j << ", t = " << t;
      fail(ErrorCode::NonFinite, os.str());
    }
}

}  // namespace

EvolutionState FixedDomainSolver::step(const EvolutionState& s, double dt) const {
  require(dt > 0.0, ErrorCode::InvalidArgument, "time step must be positive");
  EvolutionState probe = s;
  const double limit = stable_dt(probe);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the CFL step " << limit;
    fail(ErrorCode::CflViolation, os.str());
  }
  const auto& grid = op_->base().grid();
  const int n = grid.size();
  const ExtensionSource& src = op_->source();
  const std::vector<double> zero(n, 0.0);
  const auto st = op_->stencils(s.h);

  const auto ht0 = src.fill(s.t, s.h);
  const auto k1 = op_->apply(s.h, zero, st);
  auto collar_update = [&](const std::vector<double>& k) {
    std::vector<double> out = s.h;
    for (int j = 0; j < n; ++j)
      if (op_->in_collar(j)) out[j] = s.h[j] + dt * k[j];
    return out;
  };
  auto rate_to = [&](const std::vector<double>& ht1) {
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) r[j] = (ht1[j] - ht0[j]) / dt;
    return r;
  };

  EvolutionState out = s;
  out.t = s.t + dt;
  out.dt = dt;
  if (opt_.integrator == Integrator::Euler) {
    const auto partial = collar_update(k1);
    const auto rate = rate_to(src.fill(out.t, partial));
    const auto f = op_->forcing(rate, ht0, st);
    out.h = s.h;
    for (int j = 0; j < n; ++j) out.h[j] = s.h[j] + dt * (k1[j] + (op_->in_collar(j) ? 0.0 : op_->psi(j) * f[j]));
  } else {
    // Predictor with its own forcing.
    const auto pred_partial = collar_update(k1);
    const auto rate1 = rate_to(src.fill(out.t, pred_partial));
    const auto f1 = op_->forcing(rate1, ht0, st);
    std::vector<double> hs(n);
    for (int j = 0; j < n; ++j) hs[j] = s.h[j] + dt * (k1[j] + (op_->in_collar(j) ? 0.0 : op_->psi(j) * f1[j]));
    check_finite(hs, out.t);
    const auto k2 = op_->apply(hs, zero, st);
    std::vector<double> kc(n);
    for (int j = 0; j < n; ++j) kc[j] = 0.5 * (k1[j] + k2[j]);
    const auto rate = rate_to(src.fill(out.t, collar_update(kc)));
    const auto fa = op_->forcing(rate, ht0, st);
    const auto fb = op_->forcing(rate, src.fill(out.t, hs), st);
    out.h = s.h;
    for (int j = 0; j < n; ++j) {
      if (op_->in_collar(j))
        out.h[j] = s.h[j] + dt * kc[j];
      else
        out.h[j] = s.h[j] + 0.5 * dt * (k1[j] + op_->psi(j) * fa[j] + k2[j] + op_->psi(j) * fb[j]);
    }
  }
  check_finite(out.h, out.t);
  out.cfl_par = dt * probe.max_a / (grid.dx * grid.dx);
  out.cfl_adv = dt * probe.max_b / grid.dx;
  out.max_a = probe.max_a;
  out.max_b = probe.max_b;
  out.min_det_phi = probe.min_det_phi;
  return out;
}

Snapshot FixedDomainSolver::snapshot(const EvolutionState& s) const {
  const GridOperator& G = op_->base();
  const auto& grid = G.grid();
  const int n = grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Snapshot snap;
  snap.t = s.t;
  snap.h = s.h;
  auto& D = snap.diag;
  D.a.assign(n, nan);
  D.b.assign(n, nan);
  D.g.resize(n);
  D.image.resize(n);
  D.det_phi.assign(n, nan);
  D.det_B.assign(n, nan);
  const auto st = op_->stencils(s.h);
  for (int j = 0; j < n; ++j) {
    const Jet3& v = G.vjet(j);
    D.g[j] = v.value * (1.0 + s.h[j]);
    D.image[j] = G.image(j, s.h[j])(0);
    try {
      const NodeDerivs d = G.derivs(s.h, j, st[j]);
      const GEval e = G.eval(j, d);
      D.det_phi[j] = e.pf.T.det_phi;
      if (G.spec().mode() == FlowMode::GaussFlow) D.det_B[j] = G.spec().gcf_det(e.pf.g.hess, e.pf.g.grad, e.pf.g.value);
      const auto [a, b] = G.drift(j, d);
      D.a[j] = a;
      D.b[j] = b;
    } catch (const Error&) {
      if (op_->in_collar(j)) throw;
    }
  }
  if (grid.free_lo) snap.boundary.push_back(G.image(0, s.h[0]));
  if (grid.free_hi) snap.boundary.push_back(G.image(grid.last(), s.h[grid.last()]));
  snap.end_drift = grid.free_hi ? D.b[grid.last()] : -D.b[0];
  return snap;
}

Trajectory FixedDomainSolver::run(std::vector<double> h0) const {
  Trajectory tr;
  EvolutionState s;
  try {
    s = init(std::move(h0));
    tr.min_det_phi = s.min_det_phi;
    tr.snapshots.push_back(snapshot(s));
    const double T = opt_.final_time;
    const int M = opt_.snapshots;
    if (T > 0.0) {
      for (int k = 1; k <= M; ++k) {
        const double target = (k == M) ? T : T * k / M;
        while (s.t < target - 1e-14 * std::max(1.0, T)) {
          require(tr.steps < opt_.max_steps, ErrorCode::CflViolation, "step budget exhausted");
          double dt = opt_.fixed_dt > 0.0 ? opt_.fixed_dt : stable_dt(s);
          if (!std::isfinite(dt)) dt = target - s.t;
          dt = std::min(dt, target - s.t);
          s = step(s, dt);
          if (target - s.t < 1e-14 * std::max(1.0, T)) s.t = target;
          ++tr.steps;
          tr.max_cfl_par = std::max(tr.max_cfl_par, s.cfl_par);
          tr.max_cfl_adv = std::max(tr.max_cfl_adv, s.cfl_adv);
          tr.min_det_phi = std::min(tr.min_det_phi, s.min_det_phi);
        }
        tr.snapshots.push_back(snapshot(s));
      }
    }
    tr.completed = true;
  } catch (const Error& e) {
    tr.abort_reason = e.what();
    tr.abort_code = static_cast<int>(e.code());
    tr.completed = false;
    if (!s.h.empty() && (tr.snapshots.empty() || tr.snapshots.back().t < s.t)) {
      try {
        tr.snapshots.push_back(snapshot(s));
      } catch (const Error&) {
      }
    }
  }
  tr.t_reached = s.t;
  return tr;
}

double boundary_coordinate(const Snapshot& s, bool lo_end) {
  require(!s.boundary.empty(), ErrorCode::InvalidState, "snapshot has no free boundary");
  return lo_end ? s.boundary.front()(0) : s.boundary.back()(0);
}

}  // namespace fbflow
