#include "fbflow/geometry.hpp"
#include "fbflow/linearization.hpp"
#include "fbflow/transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fbflow;

namespace {

DomainSpec unit_disk() {
  DomainConfig d;
  d.boundary_nodes = 32;
  d.grid_spacing = 0.05;
  return build_domain(d);
}

Vec on_circle(double r, double th) { return Vec(Eigen::Vector2d(r * std::cos(th), r * std::sin(th))); }

struct Mirror {
  OperatorSpec spec;
  ScalarFieldPtr v;
  std::shared_ptr<SolvedHField> h;
};

Mirror mirror(double alpha, double c) {
  auto v = std::make_shared<RadialPolynomial>(2, std::vector<double>{0.25, 0.0, -1.0});
  auto g = std::make_shared<StaticField>(std::make_shared<ScaledField>(v, -c));
  return {OperatorSpec::gauss_flow(2, alpha), v, std::make_shared<SolvedHField>(g, v, 0.0)};
}

}  // namespace

TEST(Linearize, AnalyticMatchesFiniteDifferences) {
  const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
  const FunctionHField h(2, [](const Vec& x) {
    Jet2 j = Jet2::zero(2);
    j.value = 0.02 * x(0) * x(1);
    j.grad << 0.02 * x(1), 0.02 * x(0);
    j.hess(0, 1) = j.hess(1, 0) = 0.02;
    return j;
  });
  const Vec x = Vec(Eigen::Vector2d(0.5, 0.3));
  for (const auto& spec : {OperatorSpec::plaplacian(2, 3.0), OperatorSpec::plaplacian(2, 4.0)}) {
    const auto A = linearize_point(spec, h.jet(x), v->jet(x), x, LinearizationMethod::Analytic);
    const auto F = linearize_point(spec, h.jet(x), v->jet(x), x, LinearizationMethod::FiniteDifference);
    EXPECT_LT((A.a - F.a).norm(), 1e-6 * std::max(1.0, A.a.norm()));
    EXPECT_LT((A.b - F.b).norm(), 1e-6 * std::max(1.0, A.b.norm()));
    EXPECT_NEAR(A.f, F.f, 1e-6 * std::max(1.0, std::abs(A.f)));
    EXPECT_NEAR(A.G, F.G, 1e-14);
  }
  const auto m = mirror(1.0, 1.0);
  const Vec y = on_circle(0.45, 0.7);
  const auto A = linearize_point(m.spec, m.h->jet(y), m.v->jet(y), y, LinearizationMethod::Analytic);
  const auto F = linearize_point(m.spec, m.h->jet(y), m.v->jet(y), y, LinearizationMethod::FiniteDifference);
  EXPECT_LT((A.a - F.a).norm(), 1e-6 * std::max(1.0, A.a.norm()));
  EXPECT_LT((A.b - F.b).norm(), 1e-6 * std::max(1.0, A.b.norm()));
}

TEST(Linearize, PLaplacianZerothOrderAtInitialTime) {
  const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
  const Vec x = Vec(Eigen::Vector2d(0.2, 0.1));
  const auto spec = OperatorSpec::plaplacian(2, 3.0);
  const auto A = linearize_point(spec, Jet2::zero(2), v->jet(x), x, LinearizationMethod::Analytic);
  const auto F = linearize_point(spec, Jet2::zero(2), v->jet(x), x, LinearizationMethod::FiniteDifference);
  EXPECT_NEAR(A.f, F.f, 1e-6 * std::max(1.0, std::abs(A.f)));
  EXPECT_NEAR(A.G, F.G, 1e-14);
}

TEST(Boundary, PLaplacianFicheraClosedForm) {
  const auto D = unit_disk();
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  for (double p : {3.0, 4.0})
    for (const auto& b : D.nodes()) {
      const auto ba = analyze_boundary_node(OperatorSpec::plaplacian(2, p), ZeroHField(2), v, b.x, b.normal);
      EXPECT_NEAR(ba.g_n, -2.0, 1e-12);
      EXPECT_NEAR(ba.fichera, -std::pow(2.0, p - 1.0), 1e-6 * std::pow(2.0, p - 1.0));
      EXPECT_NEAR(ba.fichera, ba.cf_fichera, 1e-6 * std::pow(2.0, p - 1.0));
      EXPECT_NEAR(ba.g_n, ba.psi_nn * ba.v_n, 1e-12);
    }
}

TEST(Boundary, GaussFlowNormalDegeneracy) {
  for (double alpha : {1.0, 2.0 / 3.0}) {
    const auto m = mirror(alpha, 1.0);
    for (double th : {0.0, 1.0, 2.5}) {
      const auto ba = analyze_boundary_node(m.spec, *m.h, *m.v, on_circle(0.5, th), on_circle(1.0, th));
      EXPECT_LE(ba.nu_FA_rel, 1e-10);
      EXPECT_GT(ba.g_n, 0.0);
      EXPECT_LT(ba.v_n, 0.0);
      EXPECT_LT(ba.fichera, 0.0);
    }
  }
}

TEST(Boundary, GaussFlowClosedFormsForCoefficients) {
  const auto m = mirror(1.0, 1.0);
  BoundaryOptions fd;
  fd.method = LinearizationMethod::FiniteDifference;
  const auto ba = analyze_boundary_node(m.spec, *m.h, *m.v, on_circle(0.5, 0.3), on_circle(1.0, 0.3), fd);
  EXPECT_NEAR(ba.a(1, 1), ba.cf_ann, 1e-4 * ba.a_norm);
  EXPECT_NEAR(ba.dn_ann, ba.cf_dn_ann, 1e-4 * std::abs(ba.cf_dn_ann));
  EXPECT_NEAR(ba.b(1), ba.cf_bn, 1e-4 * std::abs(ba.cf_bn));
}

TEST(Boundary, GaussFlowFicheraIncludesTangentialDivergence) {
  // On the disk of radius R with a^{rr} = 0 on the boundary, the Cartesian
  // divergence of the normal row is d_r a^{rr} - a^{tt} / R.
  const auto m = mirror(1.0, 1.0);
  const auto ba = analyze_boundary_node(m.spec, *m.h, *m.v, on_circle(0.5, 0.0), on_circle(1.0, 0.0));
  EXPECT_NEAR(ba.div_a_n, ba.dn_ann - ba.a(0, 0) / 0.5, 1e-5);
  EXPECT_NEAR(ba.fichera, -2.0, 1e-5);
}

TEST(FicheraBound, HandEvaluation) {
  EXPECT_NEAR(gcf_fichera_bound(OperatorSpec::gauss_flow(2, 1.0), {1.0}, 1.0, -1.0, -1.0), -3.0, 1e-15);
  EXPECT_THROW(gcf_fichera_bound(OperatorSpec::gauss_flow(2, 1.0), {1.0}, 1.0, -1.0, 1.0), Error);
  EXPECT_THROW(gcf_fichera_bound(OperatorSpec::gauss_flow(2, 1.0), {-1.0}, 1.0, -1.0, -1.0), Error);
}

TEST(Audit, HeatOperatorFailsDegeneracy) {
  const auto D = unit_disk();
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  const auto spec = OperatorSpec::heat(2);
  std::vector<BoundaryAnalysis> bnd;
  for (const auto& b : D.nodes()) bnd.push_back(analyze_boundary_node(spec, ZeroHField(2), v, b.x, b.normal));
  std::vector<Vec> pts;
  for (const auto& c : build_collar(D).nodes) pts.push_back(c.x);
  const auto rep = audit_conditions(linearize(spec, ZeroHField(2), v, pts), bnd);
  EXPECT_FALSE(rep.pass_A);
  EXPECT_FALSE(rep.pass);
}

TEST(Audit, PLaplacianPasses) {
  const auto D = unit_disk();
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  const auto spec = OperatorSpec::plaplacian(2, 3.0);
  std::vector<BoundaryAnalysis> bnd;
  for (const auto& b : D.nodes()) bnd.push_back(analyze_boundary_node(spec, ZeroHField(2), v, b.x, b.normal));
  std::vector<Vec> pts;
  for (const auto& c : build_collar(D).nodes)
    if (c.flag != CollarNode::BoundaryAdjacent) pts.push_back(c.x);
  const auto rep = audit_conditions(linearize(spec, ZeroHField(2), v, pts), bnd);
  EXPECT_TRUE(rep.pass_E);
  EXPECT_TRUE(rep.pass_A);
  EXPECT_TRUE(rep.pass_B);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_A, 1e-10);
}
