#include "fbflow/config.hpp"
#include "fbflow/evolve.hpp"
#include "fbflow/oracles.hpp"
#include "fbflow/pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace fbflow;

namespace {

RunConfig wave(double dx, double T) {
  RunConfig c = parse_config(
      "[domain]\ndimension = 1\nshape = interval\nlo = -1\nhi = 0\n[numerics]\nintegrator = heun\n");
  c.domain.grid_spacing = dx;
  c.final_time = T;
  return c;
}

Trajectory run(const RunConfig& c, int snapshots = 4, double fixed_dt = 0.0) {
  const auto s = build_fixed_setup(c);
  EvolveOptions eo;
  eo.integrator = c.integrator;
  eo.final_time = c.final_time;
  eo.snapshots = snapshots;
  eo.fixed_dt = fixed_dt;
  return FixedDomainSolver(build_extended(c, s, 2), eo).run(s.h0);
}

}  // namespace

TEST(Evolve, ZeroFinalTimeGivesSeedOnly) {
  const auto tr = run(wave(1.0 / 64, 0.0));
  ASSERT_TRUE(tr.completed);
  ASSERT_EQ(tr.snapshots.size(), 1u);
  EXPECT_EQ(tr.steps, 0);
  for (double h : tr.snapshots[0].h) EXPECT_EQ(h, 0.0);
}

TEST(Evolve, TravelingWaveDisplacement) {
  const auto tr = run(wave(1.0 / 128, 0.05));
  ASSERT_TRUE(tr.completed) << tr.abort_reason;
  EXPECT_NEAR(boundary_coordinate(tr.snapshots.back()), 0.05, 5e-4);
  EXPECT_LE(tr.max_cfl_par, 0.2 + 1e-12);
  EXPECT_LE(tr.max_cfl_adv, 0.5 + 1e-12);
}

TEST(Evolve, TravelingWaveCollarProfile) {
  const auto c = wave(1.0 / 128, 0.05);
  const auto s = build_fixed_setup(c);
  const auto tr = run(c);
  ASSERT_TRUE(tr.completed);
  const auto& grid = s.G->grid();
  for (int j = 0; j < grid.size(); ++j)
    if (s.collar[j]) EXPECT_NEAR(tr.snapshots.back().h[j], 0.05 / (1.0 - grid.s[j]), 1e-4);
}

TEST(Evolve, OversizedStepIsCflViolation) {
  const auto c = wave(1.0 / 64, 0.01);
  const auto s = build_fixed_setup(c);
  EvolveOptions eo;
  eo.final_time = 0.01;
  const FixedDomainSolver solver(build_extended(c, s, 2), eo);
  auto st = solver.init(s.h0);
  const double dt = solver.stable_dt(st);
  EXPECT_NO_THROW(solver.step(st, dt));
  try {
    solver.step(st, 2.0 * dt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CflViolation);
  }
}

TEST(Evolve, FixedStepAbortIsReported) {
  const auto c = wave(1.0 / 64, 0.01);
  const auto tr = run(c, 2, 1.0);
  EXPECT_FALSE(tr.completed);
  EXPECT_EQ(tr.abort_code, static_cast<int>(ErrorCode::CflViolation));
  EXPECT_FALSE(tr.snapshots.empty());
}

TEST(Evolve, GaussFlowFlatDiskShrinks) {
  RunConfig c = parse_config(
      "[domain]\ndimension = 2\nshape = disk\nradius = 0.5\n[operator]\nflow = gcf\nalpha = 1\n"
      "[profile]\ntype = radial\ncoefficients = 0.25, 0, -1\n[initial]\ng0 = mirror\n"
      "[numerics]\ngrid_spacing = 1/100\ncollar_width = 0.05\nfinal_time = 0.005\nintegrator = heun\n");
  const auto tr = run(c, 5);
  ASSERT_TRUE(tr.completed) << tr.abort_reason;
  for (std::size_t k = 1; k < tr.snapshots.size(); ++k)
    EXPECT_LE(boundary_coordinate(tr.snapshots[k]), boundary_coordinate(tr.snapshots[k - 1]) + 1e-12);
  // Initial speed of the flat edge is -g_t / g_r = -2.
  EXPECT_NEAR(boundary_coordinate(tr.snapshots[1]), 0.5 - 2.0 * 0.001, 2e-4);
  EXPECT_GT(boundary_coordinate(tr.snapshots.back()), 0.0);
}

TEST(Direct, PressureWaveFrontSpeed) {
  DirectGrid g;
  g.x0 = -1.0;
  g.dx = 1.0 / 256;
  g.size = 385;
  const PLapPressureSolver S(g, 3.0);
  DirectState s;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = std::max(-g.s(j), 0.0);
  run_direct(S, s, 0.2, [&](const DirectState& st) { return S.front(st); });
  EXPECT_NEAR(S.front(s), 0.2, 3 * g.dx);
}

TEST(Direct, ZeroStaysZero) {
  DirectGrid g;
  g.dx = 0.01;
  g.size = 50;
  const PLapPressureSolver S(g, 3.0);
  DirectState s;
  s.values.assign(g.size, 0.0);
  s = S.step(s, 1e-3);
  for (double x : s.values) EXPECT_EQ(x, 0.0);
}

TEST(Direct, UFormConservesMass) {
  const Barenblatt B(1, 3.0, 1.0);
  DirectGrid g;
  g.radial = true;
  g.dim = 1;
  g.dx = 1.0 / 100;
  g.size = 400;
  const PLapUFormSolver S(g, 3.0);
  DirectState s;
  s.t = 0.5;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = B.u(g.s(j), s.t);
  const double m0 = S.mass(s);
  EXPECT_NEAR(m0, 1.0, 2e-2);
  run_direct(S, s, 0.6, [&](const DirectState& st) { return S.front(st); });
  EXPECT_NEAR(S.mass(s), m0, 1e-12);
}

TEST(Direct, GaussFlowStrictlyConvexSmoke) {
  // g = 1 + r^2 has det(D^2 g) = 4 and gradient 2r.
  DirectGrid g;
  g.radial = true;
  g.dim = 2;
  g.dx = 1.0 / 50;
  g.size = 51;
  const GcfRadialSolver S(g, 1.0);
  DirectState s;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = 1.0 + g.s(j) * g.s(j);
  const auto F = OperatorSpec::gauss_flow(2, 1.0);
  for (int j : {0, 10, 25}) {
    const double r = g.s(j);
    Mat A = Mat::Identity(2, 2) * 2.0;
    Vec p = Vec::Zero(2);
    p(0) = 2.0 * r;
    EXPECT_NEAR(S.rhs(s, j), F.eval(A, p, 1.0 + r * r), 0.05 * F.eval(A, p, 1.0 + r * r)) << r;
  }
  EXPECT_EQ(S.flat_radius(s), 0.0);
}

TEST(Direct, GaussFlowFlatRadiusPositiveForSmallTime) {
  DirectGrid g;
  g.radial = true;
  g.dim = 2;
  g.dx = 1.0 / 100;
  g.size = 101;
  const GcfRadialSolver S(g, 1.0);
  DirectState s;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = std::max(g.s(j) * g.s(j) - 0.25, 0.0);
  EXPECT_NEAR(S.flat_radius(s), 0.5, 1e-2);
  run_direct(S, s, 0.01, [&](const DirectState& st) { return S.flat_radius(st); });
  EXPECT_GT(S.flat_radius(s), 0.4);
  EXPECT_LT(S.flat_radius(s), 0.5);
}
