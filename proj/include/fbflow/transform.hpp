#pragma once

// The collar change of variables. A point x of the collar and the graph
// parameter h(x, t) determine the point Phi(x) = x - h grad v(x) of the moving
// domain, and g(Phi(x), t) = (1 + h) v(x).

#include "fbflow/common.hpp"
#include "fbflow/fields.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/operators.hpp"

#include <limits>
#include <vector>

namespace fbflow {

struct TransformState {
  Mat Phi;                        ///< Phi(i, l) = d Phi^i / d x_l
  Mat Psi;                        ///< inverse of Phi
  std::array<Mat, kMaxDim> Psi2;  ///< Psi2[k](i, j) = Psi^k_ij
  double det_phi = 0.0;
};

/// Closed-form Jacobians from the h-jet and the v-jet at one point. Throws
/// DiffeomorphismBreakdown when |det Phi'| <= 1e-8.
TransformState jacobians(const Jet2& h, const Jet3& v);

struct PushForward {
  TransformState T;
  Jet2 g;             ///< g and its derivatives at Phi(x)
  double den = 0.0;   ///< v + g_i v_i
  Vec image;          ///< Phi(x)
};

PushForward pushforward(const Jet2& h, const Jet3& v, const Vec& x);

struct GEval {
  double G = 0.0;
  PushForward pf;
  OperatorPartials F;
};

/// G(D^2 h, Dh, h, x) = F(D^2 g, Dg, g) / (v + g_i v_i). Throws Transversality
/// when |v + g_i v_i| <= 1e-10 * scale.
GEval transformed_G(const OperatorSpec& spec, const Jet2& h, const Jet3& v, const Vec& x);

inline Vec map_point(const Vec& x, double h, const Jet3& v) { return x - h * v.grad; }

// ----------------------------------------------------------------------------

struct SolveOptions {
  double bracket = 0.5;     ///< search interval [-bracket, bracket]
  double tol = 1e-12;       ///< absolute tolerance on the residual
  int scan = 64;            ///< sign-change scan resolution
  double warm_start = std::numeric_limits<double>::quiet_NaN();
};

/// Root h of (1 + h) v(x) - g(x - h grad v(x), t): Newton with bisection
/// safeguard inside the unique sign-change cell of the scan.
double solve_h(const Vec& x, double t, const MovingField& g, const ScalarField& v, const SolveOptions& opt = {});

/// h(., t) solved pointwise from g, with first and second derivatives by
/// implicit differentiation of the defining relation.
class SolvedHField final : public HField {
public:
  SolvedHField(MovingFieldPtr g, ScalarFieldPtr v, double t, SolveOptions opt = {})
      : g_(std::move(g)), v_(std::move(v)), t_(t), opt_(opt) {}
  int dim() const override { return v_->dim(); }
  Jet2 jet(const Vec& x) const override;

private:
  MovingFieldPtr g_;
  ScalarFieldPtr v_;
  double t_;
  SolveOptions opt_;
};

/// {Phi(x, t) : x on the boundary} for the listed boundary nodes.
std::vector<Vec> recover_boundary(const DomainSpec& domain, const HField& h, const ScalarField& v);

}  // namespace fbflow
