#pragma once

// The two second-order operators F(A, p, u) driving the pressure-form flows,
// with closed-form partial derivatives.
//
//   PLaplacian:  F = ((p-2)/(p-1)) u (|p|^{p-2} tr A + (p-2)|p|^{p-4} p^T A p) + |p|^p
//   GaussFlow:   F = (det B)^alpha / (1 + u^{2/sigma} |p|^2)^{((n+2)alpha-1)/2},
//                B = u^{1/n} A + (1/sigma) u^{1/n-1} p p^T,  sigma = n - 1/alpha.
//
// det B is evaluated in the row-factored form
//   det B = u det A + (1/sigma) p^T adj(A) p,
// which is polynomial in (A, p, u) and therefore finite at u = 0.

#include "fbflow/common.hpp"

#include <string>

namespace fbflow {

enum class FlowMode { PLaplacian, GaussFlow, Heat };

struct OperatorPartials {
  double value = 0.0;
  Mat dA;  ///< dF/dA_ij, entries treated as independent (symmetric for symmetric A)
  Vec dp;
  double du = 0.0;
};

class OperatorSpec {
public:
  static OperatorSpec plaplacian(int dim, double p_exponent);
  static OperatorSpec gauss_flow(int dim, double alpha);
  /// F = tr A. A nondegenerate fixture for the audits.
  static OperatorSpec heat(int dim);

  FlowMode mode() const { return mode_; }
  int dim() const { return dim_; }
  double p_exponent() const { return p_exponent_; }
  double alpha() const { return alpha_; }
  double sigma() const { return sigma_; }
  int two_over_sigma() const { return two_over_sigma_; }
  std::string name() const;

  double eval(const Mat& A, const Vec& p, double u) const;
  OperatorPartials partials(const Mat& A, const Vec& p, double u) const;

  /// det B in factored form (GaussFlow only).
  double gcf_det(const Mat& A, const Vec& p, double u) const;

private:
  OperatorSpec() = default;
  void check_args(const Mat& A, const Vec& p, double u) const;

  FlowMode mode_ = FlowMode::PLaplacian;
  int dim_ = 1;
  double p_exponent_ = 3.0;
  double alpha_ = 1.0;
  double sigma_ = 0.0;
  int two_over_sigma_ = 0;
};

/// Validates (n, alpha) for the Gauss flow and returns sigma; throws
/// InvalidConfig when alpha <= 1/n or 2/sigma is not a positive integer.
double validate_gauss_parameters(int dim, double alpha);

/// Cofactor matrix C with C_ij = (-1)^{i+j} M_ij. Analytic for n <= 2,
/// minors via full-pivot LU otherwise. Supports n <= kMaxDim + 1.
Eigen::MatrixXd cofactor(const Eigen::MatrixXd& A);

/// The matrix B_ij = u^{1/n} A_ij + (1/sigma) u^{1/n-1} p_i p_j for u > 0,
/// with its Schur block pieces.
struct GcfMatrix {
  Mat B;
  Mat B_prime;  ///< leading (n-1)x(n-1) block
  Vec Y;        ///< (B_n1, ..., B_n,n-1)

  static GcfMatrix build(const OperatorSpec& spec, const Mat& A, const Vec& p, double u);
  double det_direct() const;
  /// (B_nn - Y B'^{-1} Y^T) det B'.
  double det_schur() const;
};

/// Splitting of det B at an adapted boundary frame into the three displayed
/// leading terms plus a remainder E, together with the derivative checks of E.
struct DetBDecomposition {
  double det_b = 0.0;
  double leading_product = 0.0;  ///< u g_11 ... g_nn
  double leading_normal = 0.0;   ///< (1/sigma) g_11 ... g_{n-1,n-1} g_n^2
  double leading_mixed = 0.0;    ///< -(1/sigma) sum_i prod_{k!=i} g_kk (g_in + g_ni) g_i g_n
  double remainder = 0.0;        ///< E
  double dE_dpn = 0.0;
  double max_dE_dAii = 0.0;      ///< max_{i<n} |dE/dA_ii|
  double dn_dE_dAnn = 0.0;       ///< d/dx_n of dE/dA_nn along the field
  double max_di_dE_dAin = 0.0;   ///< max_{i<n} |d/dx_i of dE/dA_in|
  bool vanishing_ok = false;
};

/// g is the field jet (value, gradient, Hessian, third derivatives) in an
/// adapted frame at a boundary point. When require_boundary_state is set the
/// frame precondition (g = 0, g_i = 0 for i < n, diagonal tangential block)
/// is enforced.
DetBDecomposition gcf_detB_decomposition(const OperatorSpec& spec, const Jet3& g, double tol = 1e-8,
                                         bool require_boundary_state = true);

}  // namespace fbflow
