#include "fbflow/fields.hpp"
#include "fbflow/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fbflow;

namespace {

DomainSpec disk(int nodes = 64) {
  DomainConfig d;
  d.shape = Shape::Disk;
  d.boundary_nodes = nodes;
  return build_domain(d);
}

}  // namespace

TEST(Domain, DiskNormalsAreRadial) {
  const auto D = disk();
  ASSERT_EQ(D.nodes().size(), 64u);
  for (const auto& b : D.nodes()) {
    EXPECT_NEAR(b.x.norm(), 1.0, 1e-14);
    EXPECT_LT((b.normal - b.x).norm(), 1e-14);
    EXPECT_NEAR(b.curvatures.at(0), 1.0, 1e-12);
  }
}

TEST(Domain, IntervalEndNormals) {
  DomainConfig d;
  d.dimension = 1;
  d.shape = Shape::Interval;
  d.lo = -1;
  d.hi = 0;
  d.free_lo = d.free_hi = true;
  const auto D = build_domain(d);
  ASSERT_EQ(D.nodes().size(), 2u);
  for (const auto& b : D.nodes()) EXPECT_DOUBLE_EQ(b.normal(0), b.x(0) == 0.0 ? 1.0 : -1.0);
}

TEST(Domain, EllipseCurvatureMatchesClosedForm) {
  DomainConfig d;
  d.shape = Shape::Ellipse;
  d.semi_axes = {2.0, 1.0};
  d.boundary_nodes = 32;
  const auto D = build_domain(d);
  const double a = 2, b = 1;
  for (double th : {0.0, 0.3, 1.0, std::numbers::pi / 2, 2.5}) {
    const double s = std::sin(th), c = std::cos(th);
    EXPECT_NEAR(D.curve_curvature(th), a * b / std::pow(a * a * s * s + b * b * c * c, 1.5), 1e-12);
  }
  // At (2, 0) the curvature is a / b^2.
  EXPECT_NEAR(D.curve_curvature(0.0), 2.0, 1e-12);
}

TEST(Domain, SignedDistanceAndProjection) {
  const auto D = disk();
  const Vec x = Vec(Eigen::Vector2d(0.3, 0.4));
  EXPECT_NEAR(D.signed_distance(x), -0.5, 1e-14);
  const auto pr = D.project(x);
  EXPECT_LT((pr.foot - Vec(Eigen::Vector2d(0.6, 0.8))).norm(), 1e-12);
  EXPECT_TRUE(D.inside(x));
}

TEST(Domain, UnknownShapeRejected) { EXPECT_THROW(parse_shape("torus"), Error); }

TEST(AdaptedFrame, IdentityForLastAxis) {
  EXPECT_LT((adapted_frame(Vec(Eigen::Vector2d(0, 1))) - Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((adapted_frame(Vec(Eigen::Vector3d(0, 0, 1))) - Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(AdaptedFrame, FirstAxisIsSignedPermutation) {
  const Mat R = adapted_frame(Vec(Eigen::Vector2d(1, 0)));
  const Vec e = R * Vec(Eigen::Vector2d(1, 0));
  EXPECT_NEAR(e(0), 0.0, 1e-15);
  EXPECT_NEAR(e(1), 1.0, 1e-15);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(R(i, j)), i == j ? 0.0 : 1.0, 1e-15);
}

TEST(AdaptedFrame, DiskPointIsRotation) {
  for (double th : {0.1, 1.0, 2.0, 4.0, 5.5, std::numbers::pi}) {
    const Vec nu = Vec(Eigen::Vector2d(std::cos(th), std::sin(th)));
    const Mat R = adapted_frame(nu);
    EXPECT_LT((R * nu - Vec(Eigen::Vector2d(0, 1))).norm(), 1e-14);
    EXPECT_LT((R * R.transpose() - Mat::Identity(2, 2)).norm(), 1e-14);
    if (std::abs(th - std::numbers::pi) > 1e-12) EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
    const double phi = std::numbers::pi / 2 - th;
    if (std::abs(th - std::numbers::pi) > 1e-12) EXPECT_NEAR(R(0, 0), std::cos(phi), 1e-14);
  }
}

TEST(AdaptedFrame, ThreeDimensionsMapsNormal) {
  const Vec nu = Vec(Eigen::Vector3d(1, 2, -2)) / 3.0;
  const Mat R = adapted_frame(nu);
  EXPECT_LT((R * nu - Vec(Eigen::Vector3d(0, 0, 1))).norm(), 1e-14);
  EXPECT_LT((R * R.transpose() - Mat::Identity(3, 3)).norm(), 1e-14);
}

TEST(Collar, NodesWithinWidth) {
  DomainConfig d;
  d.shape = Shape::Disk;
  d.grid_spacing = 0.05;
  const auto D = build_domain(d);
  EXPECT_DOUBLE_EQ(D.collar_width(), 0.5);
  const auto C = build_collar(D);
  ASSERT_FALSE(C.nodes.empty());
  for (const auto& n : C.nodes) {
    EXPECT_LE(n.distance, C.eta + 1e-12);
    EXPECT_GE(n.distance, 0.0);
  }
}

TEST(Nondegeneracy, QuadraticOnUnitBall) {
  const auto D = disk();
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  const auto r = check_nondegeneracy(v, D, 1.0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.min_margin, 1.0, 1e-12);
  EXPECT_NEAR(r.min_boundary_slope, 2.0, 1e-12);
}

TEST(Nondegeneracy, SquaredProfileFails) {
  const auto D = disk();
  const RadialPolynomial v(2, {1.0, 0.0, -2.0, 0.0, 1.0});
  const auto r = check_nondegeneracy(v, D, 0.5);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.min_boundary_slope, 0.0, 1e-12);
}

TEST(Nondegeneracy, LinearProfileOnInterval) {
  DomainConfig d;
  d.dimension = 1;
  d.shape = Shape::Interval;
  const auto D = build_domain(d);
  const Polynomial1D v(0.0, {0.0, 1.0});
  const auto r = check_nondegeneracy(v, D, 1.0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.min_boundary_slope, 1.0, 1e-15);
}

TEST(Fields, RadialJetMatchesFiniteDifferences) {
  const RadialPolynomial f(2, {0.25, 0.0, -1.0, 0.0, 0.3});
  const Vec x = Vec(Eigen::Vector2d(0.3, -0.2));
  const Jet3 j = f.jet(x);
  const double e = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Vec d = Vec::Zero(2);
    d(i) = e;
    EXPECT_NEAR(j.grad(i), (f.value(x + d) - f.value(x - d)) / (2 * e), 1e-9);
    const Jet3 jp = f.jet(x + d), jm = f.jet(x - d);
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(j.hess(i, k), (jp.grad(k) - jm.grad(k)) / (2 * e), 1e-8);
      for (int l = 0; l < 2; ++l) EXPECT_NEAR(j.third[i](k, l), (jp.hess(k, l) - jm.hess(k, l)) / (2 * e), 1e-7);
    }
  }
}
