#include "fbflow/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fbflow;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec vec2(double a, double b) { return Vec(Eigen::Vector2d(a, b)); }

}  // namespace

TEST(PLaplacian, OnlyGradientTermSurvivesAtZeroPressure) {
  const auto F = OperatorSpec::plaplacian(2, 3.0);
  EXPECT_DOUBLE_EQ(F.eval(mat2(4, 1, 1, -2), vec2(0, -1), 0.0), 1.0);
}

TEST(PLaplacian, ZeroGradientGivesZero) {
  EXPECT_EQ(OperatorSpec::plaplacian(2, 3.0).eval(Mat::Identity(2, 2), vec2(0, 0), 1.0), 0.0);
}

TEST(PLaplacian, HandEvaluationP4) {
  // (2/3)(1 * 2 + 2 * 1) + 1
  EXPECT_NEAR(OperatorSpec::plaplacian(2, 4.0).eval(Mat::Identity(2, 2), vec2(1, 0), 1.0), 11.0 / 3.0, 1e-15);
}

TEST(PLaplacian, SecondOrderPartialsVanishAtZeroPressure) {
  const auto P = OperatorSpec::plaplacian(2, 3.0).partials(mat2(1, 0.2, 0.2, 3), vec2(0.3, -0.7), 0.0);
  EXPECT_EQ(P.dA.norm(), 0.0);
}

TEST(PLaplacian, RejectsExponentAtMostTwo) {
  EXPECT_THROW(OperatorSpec::plaplacian(2, 2.0), Error);
}

TEST(GaussFlow, IdentityConfiguration) {
  EXPECT_DOUBLE_EQ(OperatorSpec::gauss_flow(2, 1.0).eval(Mat::Identity(2, 2), vec2(0, 0), 1.0), 1.0);
}

TEST(GaussFlow, UnitGradient) {
  EXPECT_NEAR(OperatorSpec::gauss_flow(2, 1.0).eval(Mat::Identity(2, 2), vec2(1, 0), 1.0), 1.0 / std::sqrt(2.0),
              1e-15);
}

TEST(GaussFlow, FactoredDeterminantAtZeroPressure) {
  for (double a : {0.5, 2.0, 7.0})
    EXPECT_NEAR(OperatorSpec::gauss_flow(2, 1.0).eval(mat2(a, 0, 0, 0), vec2(0, 1), 0.0), a, 1e-15);
}

TEST(GaussFlow, FactoredFormMatchesMatrixB) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  for (double alpha : {1.0, 2.0 / 3.0}) {
    const auto F = OperatorSpec::gauss_flow(2, alpha);
    for (int k = 0; k < 50; ++k) {
      const double off = 0.3 * (U(rng) - 1.0);
      const Mat A = mat2(U(rng), off, off, U(rng));
      const Vec p = vec2(U(rng) - 1.0, U(rng) - 1.0);
      const double u = U(rng);
      const auto B = GcfMatrix::build(F, A, p, u);
      EXPECT_NEAR(B.det_direct(), F.gcf_det(A, p, u), 1e-12 * std::max(1.0, std::abs(B.det_direct())));
      EXPECT_NEAR(B.det_schur(), B.det_direct(), 1e-12 * std::max(1.0, std::abs(B.det_direct())));
    }
  }
}

TEST(GaussFlow, HomogeneityOfTheFactoredDeterminant) {
  // (A, p, u) -> lambda (A, p, u) scales u det A + p^T adj(A) p / sigma by lambda^{n+1}.
  const auto F = OperatorSpec::gauss_flow(2, 1.0);
  const Mat A = mat2(1.5, 0.2, 0.2, 0.7);
  const Vec p = vec2(0.4, 1.1);
  for (double lam : {0.5, 2.0, 3.0})
    EXPECT_NEAR(F.gcf_det(lam * A, lam * p, lam * 0.3), std::pow(lam, 3) * F.gcf_det(A, p, 0.3), 1e-12);
}

TEST(GaussFlow, ParameterValidation) {
  EXPECT_DOUBLE_EQ(validate_gauss_parameters(2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(validate_gauss_parameters(2, 2.0 / 3.0), 0.5);
  EXPECT_THROW(validate_gauss_parameters(2, 0.4), Error);
  EXPECT_THROW(validate_gauss_parameters(2, 0.5), Error);
  // sigma = 2 - 1/0.9 gives 2/sigma non-integer
  EXPECT_THROW(validate_gauss_parameters(2, 0.9), Error);
}

TEST(GaussFlow, NegativeDeterminantIsInvalidState) {
  const auto F = OperatorSpec::gauss_flow(2, 1.0);
  try {
    F.eval(mat2(-1, 0, 0, 1), vec2(0, 0), 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidState);
  }
}

TEST(GaussFlow, BoundaryStateDecomposition) {
  const auto F = OperatorSpec::gauss_flow(2, 1.0);
  Jet3 g = Jet3::zero(2);
  g.grad = vec2(0, 1);
  g.hess = mat2(2, 0, 0, 5);
  const auto D = gcf_detB_decomposition(F, g);
  EXPECT_NEAR(D.det_b, 2.0, 1e-14);
  EXPECT_NEAR(D.remainder, 0.0, 1e-14);
  EXPECT_TRUE(D.vanishing_ok);

  g.hess(0, 1) = g.hess(1, 0) = 0.3;
  const auto D2 = gcf_detB_decomposition(F, g);
  EXPECT_NEAR(D2.remainder, 0.0, 1e-14);
  EXPECT_NEAR(D2.det_b, F.gcf_det(g.hess, g.grad, 0.0), 1e-14);
}

TEST(GaussFlow, DecompositionRequiresAdaptedFrame) {
  Jet3 g = Jet3::zero(2);
  g.grad = vec2(0.5, 1);
  g.hess = mat2(2, 0, 0, 5);
  EXPECT_THROW(gcf_detB_decomposition(OperatorSpec::gauss_flow(2, 1.0), g), Error);
}

TEST(Operators, PartialsMatchFiniteDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.2, 1.5);
  const OperatorSpec specs[] = {OperatorSpec::plaplacian(2, 3.0), OperatorSpec::plaplacian(2, 4.5),
                                OperatorSpec::gauss_flow(2, 1.0), OperatorSpec::gauss_flow(2, 2.0 / 3.0),
                                OperatorSpec::heat(2)};
  for (const auto& F : specs) {
    const Mat A = mat2(U(rng), 0.1, 0.1, U(rng));
    const Vec p = vec2(U(rng), -U(rng));
    const double u = U(rng);
    const auto P = F.partials(A, p, u);
    const double e = 1e-6;
    EXPECT_NEAR(P.value, F.eval(A, p, u), 1e-14);
    EXPECT_NEAR(P.du, (F.eval(A, p, u + e) - F.eval(A, p, u - e)) / (2 * e), 1e-7) << F.name();
    for (int i = 0; i < 2; ++i) {
      Vec dp = Vec::Zero(2);
      dp(i) = e;
      EXPECT_NEAR(P.dp(i), (F.eval(A, p + dp, u) - F.eval(A, p - dp, u)) / (2 * e), 1e-7) << F.name();
      for (int j = 0; j < 2; ++j) {
        Mat dA = Mat::Zero(2, 2);
        dA(i, j) = e;
        EXPECT_NEAR(P.dA(i, j), (F.eval(A + dA, p, u) - F.eval(A - dA, p, u)) / (2 * e), 1e-7) << F.name();
      }
    }
  }
}

TEST(Operators, CofactorIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int n = 1; n <= 4; ++n) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = U(rng) + (i == j ? 2.0 : 0.0);
    const Eigen::MatrixXd C = cofactor(A);
    const Eigen::MatrixXd I = A * C.transpose() / A.determinant();
    EXPECT_LT((I - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12) << "n = " << n;
  }
}
