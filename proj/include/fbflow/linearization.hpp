#pragma once

// Coefficients of the linearized transformed operator
//   DG_h(w) = a^{ij} w_ij + b^i w_i + f w,
// the boundary closed forms they are checked against, and the audit of the
// degeneracy and Fichera conditions at the boundary.

#include "fbflow/common.hpp"
#include "fbflow/fields.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/operators.hpp"
#include "fbflow/transform.hpp"

#include <vector>

namespace fbflow {

enum class LinearizationMethod { Analytic, FiniteDifference };

struct PointCoefficients {
  Mat a;  ///< symmetric
  Vec b;
  double f = 0.0;
  double G = 0.0;
};

/// Coefficients at one point from the h-jet and v-jet there. The analytic path
/// differentiates the pushforward with forward-mode AD and chains the exact
/// partials of F; the finite-difference path uses central differences of G in
/// the jet entries with step eps.
PointCoefficients linearize_point(const OperatorSpec& spec, const Jet2& h, const Jet3& v, const Vec& x,
                                  LinearizationMethod method = LinearizationMethod::Analytic, double eps = 1e-5);

struct LinearCoefficients {
  std::vector<Vec> nodes;
  std::vector<PointCoefficients> coeffs;
};

LinearCoefficients linearize(const OperatorSpec& spec, const HField& h, const ScalarField& v,
                             const std::vector<Vec>& nodes,
                             LinearizationMethod method = LinearizationMethod::Analytic);

/// Everything known at one boundary node, expressed in the adapted frame
/// (normal = e_n). Spatial derivatives use one-sided second-order stencils
/// into the domain.
struct BoundaryAnalysis {
  Vec x;
  Mat frame;
  // Numerical coefficients.
  Mat a;
  Vec b;
  double f = 0.0;
  double dn_ann = 0.0;    ///< d_n a^{nn}
  double div_a_n = 0.0;   ///< sum_k d_k a^{nk}
  double fichera = 0.0;   ///< b^n - sum_k d_k a^{nk}
  double a_norm = 0.0;
  // Closed forms.
  double cf_ann = 0.0;
  double cf_dn_ann = 0.0;
  double cf_bn = 0.0;
  double cf_fichera = 0.0;
  // Ingredients.
  double h = 0.0;
  double g = 0.0;
  double g_n = 0.0;
  double v_n = 0.0;
  double psi_nn = 0.0;
  double phi_nn = 0.0;
  double F = 0.0;
  Mat F_A;
  Vec F_p;
  Mat h_hess;
  Mat g_hess;
  double dn_FA_nn = 0.0;
  Vec di_FA_in;  ///< d_i (dF/dA_in), i < n
  double nu_FA_rel = 0.0;  ///< max_j |nu^i dF/dA_ij| / ||dF/dA||
};

struct BoundaryOptions {
  LinearizationMethod method = LinearizationMethod::Analytic;
  double eps = 1e-5;    ///< jet perturbation for the finite-difference path
  double delta = 1e-4;  ///< spatial stencil step
};

BoundaryAnalysis analyze_boundary_node(const OperatorSpec& spec, const HField& h, const ScalarField& v,
                                       const Vec& x, const Vec& normal, const BoundaryOptions& opt = {});

/// (alpha (2n-1) / sigma^alpha) (g_11 ... g_{n-1,n-1})^alpha (g_n^2)^{alpha-1} (Psi^n_n)^2 v_n.
/// Throws FramePrecondition unless g_n > 0, v_n < 0 and all g_ii > 0.
double gcf_fichera_bound(const OperatorSpec& spec, const std::vector<double>& g_tangential, double g_n,
                         double psi_nn, double v_n);
double gcf_fichera_bound(const OperatorSpec& spec, const BoundaryAnalysis& ba);

// ----------------------------------------------------------------------------

struct AuditTolerances {
  double tol_A = 1e-8;
  double fichera_margin = 1e-10;
  bool strict = true;  ///< t = 0: margins required; t > 0: sign only
};

struct NodeMargins {
  Vec x;
  bool boundary = false;
  double E = 0.0;   ///< min eigenvalue of a (interior nodes)
  double A = 0.0;   ///< |a^{ij} nu_i nu_j| / ||a||
  double B = 0.0;   ///< Fichera value
  double A2 = 0.0;  ///< (d_k a^{ij}) nu_k nu_i nu_j
};

struct ConditionReport {
  double min_E = 0.0;
  double max_A = 0.0;
  double max_B = 0.0;
  double max_A2 = 0.0;
  double a_scale = 0.0;
  bool pass_E = false, pass_A = false, pass_B = false, pass_A2 = false;
  bool pass = false;
  std::vector<NodeMargins> nodes;
};

ConditionReport audit_conditions(const LinearCoefficients& interior, const std::vector<BoundaryAnalysis>& boundary,
                                 const AuditTolerances& tol = {});

}  // namespace fbflow
