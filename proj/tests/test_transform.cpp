#include "fbflow/fields.hpp"
#include "fbflow/oracles.hpp"
#include "fbflow/transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fbflow;

namespace {

// g(y, t) = t - y on the local model (-inf, 0) with v = -x.
class LinearWave final : public MovingField {
public:
  int dim() const override { return 1; }
  Jet2 jet(const Vec& y, double t) const override {
    Jet2 j = Jet2::zero(1);
    j.value = t - y(0);
    j.grad(0) = -1.0;
    return j;
  }
  std::string name() const override { return "linear-wave"; }
};

ScalarFieldPtr minus_x() { return std::make_shared<Polynomial1D>(0.0, std::vector<double>{0.0, 1.0}); }

Vec X(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST(SolveH, LocalModelClosedForm) {
  const LinearWave g;
  const auto v = minus_x();
  for (double t : {0.0, 0.01, 0.1, 0.3})
    for (double x : {-1.0, -0.5, -0.1, 0.0}) EXPECT_NEAR(solve_h(X(x), t, g, *v), t / (1.0 - x), 1e-13);
  EXPECT_NEAR(solve_h(X(-1.0), 0.2, g, *v), 0.1, 1e-14);
}

TEST(SolveH, InitialDataGivesZero) {
  const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
  const StaticField g(v);
  for (double r : {0.0, 0.5, 0.9, 1.0}) EXPECT_NEAR(solve_h(Vec(Eigen::Vector2d(r, 0)), 0.0, g, *v), 0.0, 1e-14);
}

TEST(SolveH, AgreesWithBisection) {
  const TravelingWave g(1, 1.5, 3.0);
  const auto v = minus_x();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> Ux(-0.9, 0.0), Ut(0.0, 0.1);
  for (int k = 0; k < 200; ++k) {
    const Vec x = X(Ux(rng));
    const double t = Ut(rng);
    EXPECT_NEAR(solve_h(x, t, g, *v), brute_force_h(x, t, g, *v, -0.5, 0.5), 1e-12);
  }
}

TEST(SolveH, NoRootIsRootBracket) {
  const LinearWave g;
  const auto v = minus_x();
  SolveOptions opt;
  opt.bracket = 0.01;
  try {
    solve_h(X(-0.5), 1.0, g, *v, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RootBracket);
  }
}

TEST(Jacobians, IdentityForZeroH) {
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  const auto T = jacobians(Jet2::zero(2), v.jet(Vec(Eigen::Vector2d(0.3, 0.5))));
  EXPECT_LT((T.Phi - Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((T.Psi - Mat::Identity(2, 2)).norm(), 1e-15);
  for (int k = 0; k < 2; ++k) EXPECT_LT(T.Psi2[k].norm(), 1e-15);
  EXPECT_DOUBLE_EQ(T.det_phi, 1.0);
}

TEST(Jacobians, InverseAndSecondDerivativesConsistent) {
  // Psi^k_ij from the closed form against differences of Psi along the map.
  const auto v = std::make_shared<RadialPolynomial>(2, std::vector<double>{0.25, 0.0, -1.0});
  const FunctionHField h(2, [](const Vec& x) {
    Jet2 j = Jet2::zero(2);
    j.value = 0.05 * x(0) * x(0) + 0.02 * x(1);
    j.grad << 0.1 * x(0), 0.02;
    j.hess(0, 0) = 0.1;
    return j;
  });
  const Vec x = Vec(Eigen::Vector2d(0.4, 0.2));
  const auto T = jacobians(h.jet(x), v->jet(x));
  EXPECT_LT((T.Psi * T.Phi - Mat::Identity(2, 2)).norm(), 1e-13);
  const double e = 1e-6;
  for (int l = 0; l < 2; ++l) {
    Vec d = Vec::Zero(2);
    d(l) = e;
    const auto Tp = jacobians(h.jet(x + d), v->jet(x + d));
    const auto Tm = jacobians(h.jet(x - d), v->jet(x - d));
    // d Psi / d x_l = Psi^k_{ij} Phi^j_l
    const Mat dPsi = (Tp.Psi - Tm.Psi) / (2 * e);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int j = 0; j < 2; ++j) s += T.Psi2[k](i, j) * T.Phi(j, l);
        EXPECT_NEAR(dPsi(k, i), s, 1e-7);
      }
  }
}

TEST(Jacobians, BreakdownDetected) {
  const Polynomial1D v(0.0, {0.0, 1.0});
  Jet2 h = Jet2::zero(1);
  h.grad(0) = -1.0;  // v = -x, so Phi' = 1 - h_x v_x = 0
  try {
    jacobians(h, v.jet(X(-0.3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DiffeomorphismBreakdown);
  }
}

TEST(Pushforward, IdentityAtInitialTime) {
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  const Vec x = Vec(Eigen::Vector2d(0.6, -0.3));
  const auto pf = pushforward(Jet2::zero(2), v.jet(x), x);
  const Jet3 vj = v.jet(x);
  EXPECT_NEAR(pf.g.value, vj.value, 1e-15);
  EXPECT_LT((pf.g.grad - vj.grad).norm(), 1e-15);
  EXPECT_LT((pf.g.hess - vj.hess).norm(), 1e-15);
}

TEST(Pushforward, GradientMatchesReconstruction) {
  // Random smooth h on the 1D model; g at Phi(x) is (1 + h) v, so g_y equals
  // d/dx [(1 + h) v] / Phi'(x).
  const auto v = minus_x();
  const FunctionHField h(1, [](const Vec& x) {
    Jet2 j = Jet2::zero(1);
    j.value = 0.1 + 0.05 * std::sin(3 * x(0));
    j.grad(0) = 0.15 * std::cos(3 * x(0));
    j.hess(0, 0) = -0.45 * std::sin(3 * x(0));
    return j;
  });
  const double e = 1e-5;
  auto gval = [&](double x) { return (1.0 + h.jet(X(x)).value) * v->value(X(x)); };
  auto ypos = [&](double x) { return map_point(X(x), h.jet(X(x)).value, v->jet(X(x)))(0); };
  for (double x : {-0.8, -0.4, -0.1}) {
    const auto pf = pushforward(h.jet(X(x)), v->jet(X(x)), X(x));
    const double dg = (gval(x + e) - gval(x - e)) / (ypos(x + e) - ypos(x - e));
    EXPECT_NEAR(pf.g.grad(0), dg, 1e-9);
    const auto pp = pushforward(h.jet(X(x + e)), v->jet(X(x + e)), X(x + e));
    const auto pm = pushforward(h.jet(X(x - e)), v->jet(X(x - e)), X(x - e));
    EXPECT_NEAR(pf.g.hess(0, 0), (pp.g.grad(0) - pm.g.grad(0)) / (pp.image(0) - pm.image(0)), 1e-6);
  }
}

TEST(TransformedG, TravelingWaveGivesTimeDerivative) {
  // g = t - y, p = 3: F = |g_y|^3 = 1, and h = t / (1 - x) has h_t = 1 / (1 - x).
  const auto spec = OperatorSpec::plaplacian(1, 3.0);
  const auto v = minus_x();
  const LinearWave g;
  const double t = 0.05;
  const SolvedHField h(std::make_shared<LinearWave>(), v, t);
  for (double x : {-0.9, -0.5, -0.2, 0.0}) {
    const auto G = transformed_G(spec, h.jet(X(x)), v->jet(X(x)), X(x));
    EXPECT_NEAR(G.G, 1.0 / (1.0 - x), 1e-10);
  }
}

TEST(TransformedG, TransversalityFailure) {
  const auto spec = OperatorSpec::plaplacian(1, 3.0);
  const Polynomial1D v(0.0, {0.0, 1.0});
  Jet2 h = Jet2::zero(1);
  h.value = -1.0;  // g = (1 + h) v = 0 with zero gradient contribution
  EXPECT_THROW(transformed_G(spec, h, v.jet(X(0.0)), X(0.0)), Error);
}

TEST(SolvedHField, DerivativesMatchFiniteDifferences) {
  const auto v = std::make_shared<RadialPolynomial>(2, std::vector<double>{0.25, 0.0, -1.0});
  const SolvedHField h(std::make_shared<StaticField>(std::make_shared<ScaledField>(v, -1.3)), v, 0.0);
  const Vec x = Vec(Eigen::Vector2d(0.4, 0.25));
  const Jet2 j = h.jet(x);
  const double e = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Vec d = Vec::Zero(2);
    d(i) = e;
    EXPECT_NEAR(j.grad(i), (h.jet(x + d).value - h.jet(x - d).value) / (2 * e), 1e-8);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(j.hess(i, k), (h.jet(x + d).grad(k) - h.jet(x - d).grad(k)) / (2 * e), 1e-6);
  }
}

TEST(RecoverBoundary, LocalModelMovesWithWave) {
  DomainConfig d;
  d.dimension = 1;
  d.shape = Shape::Interval;
  const auto D = build_domain(d);
  const auto v = minus_x();
  for (double t : {0.0, 0.05, 0.2}) {
    const SolvedHField h(std::make_shared<LinearWave>(), v, t);
    const auto pts = recover_boundary(D, h, *v);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0](0), t, 1e-13);
  }
}
