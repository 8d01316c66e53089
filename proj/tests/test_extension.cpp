#include "fbflow/config.hpp"
#include "fbflow/extension.hpp"
#include "fbflow/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fbflow;

namespace {

RunConfig wave(double dx) {
  RunConfig c = parse_config("[domain]\ndimension = 1\nshape = interval\nlo = -1\nhi = 0\n");
  c.domain.grid_spacing = dx;
  return c;
}

}  // namespace

TEST(Cutoff, Smoothstep) {
  EXPECT_EQ(smoothstep5(-1.0), 0.0);
  EXPECT_EQ(smoothstep5(0.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep5(0.5), 0.5);
  EXPECT_EQ(smoothstep5(1.0), 1.0);
  EXPECT_EQ(smoothstep5(2.0), 1.0);
  for (double u = 0.0; u <= 1.0; u += 0.05) EXPECT_NEAR(smoothstep5(u) + smoothstep5(1.0 - u), 1.0, 1e-14);
}

TEST(Cutoff, ProfileZonesAndMidpoint) {
  const CutoffProfile psi(0.2);
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_EQ(psi(0.1), 0.0);
  EXPECT_DOUBLE_EQ(psi(0.15), 0.5);
  EXPECT_EQ(psi(0.2), 1.0);
  EXPECT_EQ(psi(0.7), 1.0);
}

TEST(Cutoff, CollarMustNotCoverDomain) {
  EXPECT_THROW(build_cutoff(1.0, 0.8), Error);
  EXPECT_NO_THROW(build_cutoff(0.5, 0.8));
}

TEST(TaylorSeed, OrderZeroIsInitialField) {
  const auto s = build_fixed_setup(wave(1.0 / 64));
  const auto st = choose_stencils(*s.G, s.h0, s.collar);
  const auto seed = taylor_seed(*s.G, s.h0, 0, st);
  ASSERT_EQ(seed.order(), 0);
  EXPECT_EQ(seed.coeffs[0], s.h0);
  EXPECT_EQ(seed.at(0.3), s.h0);
}

TEST(TaylorSeed, FirstCoefficientIsOperator) {
  const auto s = build_fixed_setup(wave(1.0 / 64));
  const auto st = choose_stencils(*s.G, s.h0, s.collar);
  const auto seed = taylor_seed(*s.G, s.h0, 2, st);
  for (int j = 0; j < s.G->grid().size(); ++j) {
    ASSERT_TRUE(seed.valid[j]);
    EXPECT_DOUBLE_EQ(seed.coeffs[1][j], s.G->G(s.h0, j, st[j]));
  }
}

TEST(TaylorSeed, LinearWaveCoefficients) {
  // h = t / (1 - x): h1 = 1 / (1 - x) and h2 = 0, reproduced by the discrete
  // system up to truncation error.
  const auto s = build_fixed_setup(wave(1.0 / 128));
  const auto st = choose_stencils(*s.G, s.h0, s.collar);
  const auto seed = taylor_seed(*s.G, s.h0, 2, st);
  const auto& grid = s.G->grid();
  for (int j = 0; j < grid.size(); ++j) {
    if (!s.collar[j]) continue;
    EXPECT_NEAR(seed.coeffs[1][j], 1.0 / (1.0 - grid.s[j]), 1e-8);
    EXPECT_NEAR(seed.coeffs[2][j], 0.0, 1e-3);
  }
}

TEST(Extension, HarmonicFillIsLinearInInterior) {
  const auto s = build_fixed_setup(wave(1.0 / 32));
  const auto& grid = s.G->grid();
  const HarmonicExtension ext(grid, s.eta);
  std::vector<double> h(grid.size());
  for (int j = 0; j < grid.size(); ++j) h[j] = std::sin(3.0 * grid.s[j]);
  const auto f = ext.fill(0.0, h);
  for (int j = 0; j < grid.size(); ++j)
    if (s.collar[j]) EXPECT_EQ(f[j], h[j]);
  int first = 0;
  while (s.collar[first]) ++first;
  for (int j = 0; j < grid.size(); ++j)
    if (!s.collar[j]) EXPECT_TRUE(std::isfinite(f[j]));
}

TEST(Extension, ZeroOperatorLeavesStateFixed) {
  // With htilde equal to the state and no forcing, the interior of Ghat is
  // Gtilde; a flat state under the Laplacian blend stays put.
  const auto s = build_fixed_setup(wave(1.0 / 64));
  const auto& grid = s.G->grid();
  BlendSpec blend;
  const ExtendedOperator op(s.G, s.eta, blend, std::make_shared<HarmonicExtension>(grid, s.eta));
  const std::vector<double> flat(grid.size(), 0.0);
  for (int j = 0; j < grid.size(); ++j)
    if (op.chi(j) >= 1.0) EXPECT_EQ(op.G_tilde(flat, j, Stencil::Central), 0.0);
}

TEST(Extension, BlendLeavesCollarUntouched) {
  const auto s = build_fixed_setup(wave(1.0 / 64));
  const auto& grid = s.G->grid();
  BlendSpec blend;
  const ExtendedOperator op(s.G, s.eta, blend, std::make_shared<HarmonicExtension>(grid, s.eta));
  const auto st = op.stencils(s.h0);
  for (int j = 0; j < grid.size(); ++j) {
    if (!op.in_collar(j)) continue;
    EXPECT_EQ(op.chi(j), 0.0);
    EXPECT_EQ(op.G_tilde(s.h0, j, st[j]), s.G->G(s.h0, j, st[j]));
  }
  BlendSpec bad;
  bad.start = 0.5;
  EXPECT_THROW(ExtendedOperator(s.G, s.eta, bad, std::make_shared<HarmonicExtension>(grid, s.eta)), Error);
}
