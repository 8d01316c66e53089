#pragma once

// Explicit time stepping of h_t = Ghat(h) on the fixed grid, and the direct
// moving-domain solvers used to cross-check it.

#include "fbflow/common.hpp"
#include "fbflow/extension.hpp"
#include "fbflow/grid_operator.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fbflow {

enum class Integrator { Euler, Heun };

struct EvolveOptions {
  Integrator integrator = Integrator::Euler;
  double c_par = 0.2;
  double c_adv = 0.5;
  double final_time = 0.0;
  int snapshots = 10;          ///< number of equal intervals; snapshot 0 is the seed
  double fixed_dt = 0.0;       ///< > 0 overrides the CFL step (still checked against it)
  int max_steps = 10000000;
};

struct EvolutionState {
  double t = 0.0;
  std::vector<double> h;
  double dt = 0.0;
  double cfl_par = 0.0;   ///< dt * max a / dx^2
  double cfl_adv = 0.0;   ///< dt * max |b| / dx
  double min_det_phi = 0.0;
  double max_a = 0.0;
  double max_b = 0.0;
};

struct NodeDiagnostics {
  std::vector<double> a, b, g, image, det_phi, det_B;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> h;
  NodeDiagnostics diag;
  std::vector<Vec> boundary;  ///< images of the free-end nodes
  double end_drift = 0.0;     ///< b at the free end (outward normal)
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  int steps = 0;
  double t_reached = 0.0;
  double max_cfl_par = 0.0;
  double max_cfl_adv = 0.0;
  double min_det_phi = 0.0;
  bool completed = false;
  std::string abort_reason;
  int abort_code = 0;  ///< ErrorCode of the abort, 0 when completed
};

class FixedDomainSolver {
public:
  FixedDomainSolver(std::shared_ptr<const ExtendedOperator> op, EvolveOptions opt);

  const ExtendedOperator& op() const { return *op_; }
  const EvolveOptions& options() const { return opt_; }

  EvolutionState init(std::vector<double> h0) const;

  /// Largest step allowed by both CFL limits over all nodes (blended
  /// coefficients inside); fills the coefficient maxima of the state.
  double stable_dt(EvolutionState& s) const;

  /// One Euler or Heun step of length dt. Throws CflViolation when dt exceeds
  /// the CFL step by more than 1e-12 relative, NonFinite on NaN/Inf.
  EvolutionState step(const EvolutionState& s, double dt) const;

  Snapshot snapshot(const EvolutionState& s) const;

  /// Advances to the final time; stops early with partial output on
  /// diffeomorphism breakdown or any other abort.
  Trajectory run(std::vector<double> h0) const;

private:
  std::shared_ptr<const ExtendedOperator> op_;
  EvolveOptions opt_;
};

/// Recovered free-boundary position along the grid coordinate (1D: the image
/// of the free end; radial: the image radius).
double boundary_coordinate(const Snapshot& s, bool lo_end = false);

// ----------------------------------------------------------------------------

struct DirectGrid {
  double x0 = 0.0;
  double dx = 0.0;
  int size = 0;
  bool radial = false;
  int dim = 1;
  double s(int j) const { return x0 + j * dx; }
};

struct DirectState {
  double t = 0.0;
  std::vector<double> values;  ///< g (pressure form) or u
  bool clamped = false;
};

struct DirectOptions {
  double c_par = 0.2;
  double c_adv = 0.5;
};

/// Pressure form g_t = c g Delta_p g + |grad g|^p with c = (p-2)/(p-1). The
/// squared gradient in the hyperbolic term is the Godunov upwind value.
class PLapPressureSolver {
public:
  PLapPressureSolver(DirectGrid grid, double p, DirectOptions opt = {});
  double stable_dt(const DirectState& s) const;
  DirectState step(const DirectState& s, double dt) const;
  /// Rightmost edge of {g > 0}, linearly interpolated.
  double front(const DirectState& s) const;
  const DirectGrid& grid() const { return grid_; }

private:
  DirectGrid grid_;
  double p_;
  DirectOptions opt_;
};

/// Divergence form u_t = div(|grad u|^{p-2} grad u), conservative fluxes.
class PLapUFormSolver {
public:
  PLapUFormSolver(DirectGrid grid, double p, DirectOptions opt = {});
  double stable_dt(const DirectState& s) const;
  DirectState step(const DirectState& s, double dt) const;
  double mass(const DirectState& s) const;
  /// Rightmost edge of the support from the pressure, linearly interpolated.
  double front(const DirectState& s) const;
  const DirectGrid& grid() const { return grid_; }

private:
  DirectGrid grid_;
  double p_;
  DirectOptions opt_;
};

/// Radial Gauss-curvature flow in pressure form on [0, r_max], n = 2. The flat
/// disk is {g = 0} around the origin.
class GcfRadialSolver {
public:
  GcfRadialSolver(DirectGrid grid, double alpha, DirectOptions opt = {});
  double stable_dt(const DirectState& s) const;
  /// Throws Convexity when the graph loses convexity.
  DirectState step(const DirectState& s, double dt) const;
  /// Flat radius from the linear extrapolation of the resolved profile (0
  /// without a flat disk).
  double flat_radius(const DirectState& s) const;
  double rhs(const DirectState& s, int j) const;
  const DirectGrid& grid() const { return grid_; }

private:
  DirectGrid grid_;
  double alpha_;
  DirectOptions opt_;
};

/// Runs a direct solver to time T, recording (t, front) after every step.
template <class Solver, class Front>
std::vector<std::pair<double, double>> run_direct(const Solver& solver, DirectState& s, double T, Front front) {
  std::vector<std::pair<double, double>> trace{{s.t, front(s)}};
  while (s.t < T - 1e-14) {
    double dt = std::min(solver.stable_dt(s), T - s.t);
    s = solver.step(s, dt);
    require(!s.clamped, ErrorCode::InvalidState, "direct solver clamped a negative value");
    trace.emplace_back(s.t, front(s));
  }
  return trace;
}

}  // namespace fbflow
