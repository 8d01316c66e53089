#include "fbflow/linearization.hpp"

#include "push_jets.hpp"

#include <cmath>
#include <sstream>

namespace fbflow {

namespace {

using detail::AD;
using detail::ADVec;

int jet_size(int n) { return 1 + n + n * (n + 1) / 2; }

int hess_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle after the value and the gradient.
  int k = 1 + n;
  for (int r = 0; r < i; ++r) k += n - r;
  return k + (j - i);
}

ADVec deriv(const AD& x, int m) {
  if (x.derivatives().size() == 0) return ADVec::Zero(m);
  return x.derivatives();
}

PointCoefficients unpack(int n, const Eigen::VectorXd& dG, double G) {
  PointCoefficients pc;
  pc.G = G;
  pc.f = dG(0);
  pc.b = dG.segment(1, n);
  pc.a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double d = dG(hess_index(n, i, j));
      if (i == j) pc.a(i, i) = d;
      else pc.a(i, j) = pc.a(j, i) = 0.5 * d;
    }
  return pc;
}

PointCoefficients analytic_point(const OperatorSpec& spec, const Jet2& hj, const Jet3& v, const Vec& x) {
  const int n = hj.dim();
  const int m = jet_size(n);
  const AD h(hj.value, m, 0);
  detail::VecT<AD> hg(n);
  detail::MatT<AD> hh(n, n);
  for (int i = 0; i < n; ++i) hg(i) = AD(hj.grad(i), m, 1 + i);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const AD e(hj.hess(i, j), m, hess_index(n, i, j));
      hh(i, j) = e;
      hh(j, i) = e;
    }
  const auto P = detail::push_jets<AD>(h, hg, hh, v);
  if (!(std::abs(P.det_phi.value()) > 1e-8))
    fail(ErrorCode::DiffeomorphismBreakdown, "det Phi' vanishes in the linearization");

  Mat A(n, n);
  Vec p(n);
  for (int i = 0; i < n; ++i) {
    p(i) = P.dg(i).value();
    for (int j = 0; j < n; ++j) A(i, j) = 0.5 * (P.d2g(i, j).value() + P.d2g(j, i).value());
  }
  const double u = P.g.value();
  const double den = P.den.value();
  const double scale = std::max({1.0, std::abs(v.value), p.norm() * v.grad.norm()});
  if (!(std::abs(den) > 1e-10 * scale)) fail(ErrorCode::Transversality, "v + g_i v_i vanishes in the linearization");

  const OperatorPartials F = spec.partials(A, p, u);
  Eigen::VectorXd num = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) {
    num += F.dp(i) * deriv(P.dg(i), m);
    for (int j = 0; j < n; ++j) num += F.dA(i, j) * deriv(P.d2g(i, j), m);
  }
  num += F.du * deriv(P.g, m);
  const Eigen::VectorXd dG = num / den - (F.value / (den * den)) * Eigen::VectorXd(deriv(P.den, m));
  (void)x;
  return unpack(n, dG, F.value / den);
}

PointCoefficients fd_point(const OperatorSpec& spec, const Jet2& hj, const Jet3& v, const Vec& x, double eps) {
  const int n = hj.dim();
  const int m = jet_size(n);
  auto G = [&](const Jet2& j) { return transformed_G(spec, j, v, x).G; };
  Eigen::VectorXd dG(m);
  for (int k = 0; k < m; ++k) {
    Jet2 jp = hj, jm = hj;
    if (k == 0) {
      jp.value += eps;
      jm.value -= eps;
    } else if (k <= n) {
      jp.grad(k - 1) += eps;
      jm.grad(k - 1) -= eps;
    } else {
      int i = 0, j = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          if (hess_index(n, a, b) == k) {
            i = a;
            j = b;
          }
      jp.hess(i, j) += eps;
      jm.hess(i, j) -= eps;
      if (i != j) {
        jp.hess(j, i) += eps;
        jm.hess(j, i) -= eps;
      }
    }
    dG(k) = (G(jp) - G(jm)) / (2.0 * eps);
  }
  return unpack(n, dG, G(hj));
}

struct StencilValue {
  Mat a;
  Mat FA;
};

}  // namespace

PointCoefficients linearize_point(const OperatorSpec& spec, const Jet2& h, const Jet3& v, const Vec& x,
                                  LinearizationMethod method, double eps) {
  require(h.dim() == spec.dim() && v.dim() == spec.dim(), ErrorCode::InvalidArgument,
          "linearize: dimension mismatch");
  return method == LinearizationMethod::Analytic ? analytic_point(spec, h, v, x) : fd_point(spec, h, v, x, eps);
}

LinearCoefficients linearize(const OperatorSpec& spec, const HField& h, const ScalarField& v,
                             const std::vector<Vec>& nodes, LinearizationMethod method) {
  LinearCoefficients out;
  out.nodes = nodes;
  out.coeffs.reserve(nodes.size());
  for (const auto& x : nodes) out.coeffs.push_back(linearize_point(spec, h.jet(x), v.jet(x), x, method));
  return out;
}

// ----------------------------------------------------------------------------

BoundaryAnalysis analyze_boundary_node(const OperatorSpec& spec, const HField& h, const ScalarField& v,
                                       const Vec& x, const Vec& normal, const BoundaryOptions& opt) {
  const int n = spec.dim();
  require(x.size() == n && normal.size() == n, ErrorCode::InvalidArgument, "boundary analysis: dimension mismatch");
  BoundaryAnalysis ba;
  ba.x = x;
  ba.frame = adapted_frame(normal);
  const Mat& R = ba.frame;
  const Mat Rt = R.transpose();

  auto sample = [&](const Vec& y) {
    const Jet2 hj = h.jet(y);
    const Jet3 vj = v.jet(y);
    const PointCoefficients pc = linearize_point(spec, hj, vj, y, opt.method, opt.eps);
    const GEval ge = transformed_G(spec, hj, vj, y);
    return StencilValue{pc.a, ge.F.dA};
  };

  // Base point.
  const Jet2 hj = h.jet(x);
  const Jet3 vj = v.jet(x);
  const PointCoefficients pc = linearize_point(spec, hj, vj, x, opt.method, opt.eps);
  const GEval ge = transformed_G(spec, hj, vj, x);
  const StencilValue q0{pc.a, ge.F.dA};

  const double d = opt.delta;
  std::array<StencilValue, kMaxDim> dq;
  // Normal: one-sided into the domain.
  {
    const StencilValue q1 = sample(x - d * normal), q2 = sample(x - 2 * d * normal);
    dq[n - 1] = {(3 * q0.a - 4 * q1.a + q2.a) / (2 * d), (3 * q0.FA - 4 * q1.FA + q2.FA) / (2 * d)};
  }
  // Tangential: central differences on the lines offset inward by d and 2d,
  // extrapolated linearly back to the boundary.
  for (int k = 0; k < n - 1; ++k) {
    const Vec dir = Rt.col(k);
    auto D = [&](double s) {
      const Vec base = x - s * d * normal;
      const StencilValue p = sample(base + d * dir), m = sample(base - d * dir);
      return StencilValue{(p.a - m.a) / (2 * d), (p.FA - m.FA) / (2 * d)};
    };
    const StencilValue d1 = D(1.0), d2 = D(2.0);
    dq[k] = {2 * d1.a - d2.a, 2 * d1.FA - d2.FA};
  }

  // Adapted frame quantities.
  ba.a = R * pc.a * Rt;
  ba.b = R * pc.b;
  ba.f = pc.f;
  ba.a_norm = pc.a.norm();
  std::array<Mat, kMaxDim> da, dFA;
  for (int k = 0; k < n; ++k) {
    da[k] = R * dq[k].a * Rt;
    dFA[k] = R * dq[k].FA * Rt;
  }
  ba.dn_ann = da[n - 1](n - 1, n - 1);
  ba.div_a_n = 0.0;
  for (int k = 0; k < n; ++k) ba.div_a_n += da[k](n - 1, k);
  ba.fichera = ba.b(n - 1) - ba.div_a_n;

  const Mat Psi = R * ge.pf.T.Psi * Rt;
  const Mat Phi = R * ge.pf.T.Phi * Rt;
  const Vec gg = R * ge.pf.g.grad;
  const Vec vg = R * vj.grad;
  ba.h = hj.value;
  ba.g = ge.pf.g.value;
  ba.g_n = gg(n - 1);
  ba.v_n = vg(n - 1);
  ba.psi_nn = Psi(n - 1, n - 1);
  ba.phi_nn = Phi(n - 1, n - 1);
  ba.F = ge.F.value;
  ba.F_A = R * ge.F.dA * Rt;
  ba.F_p = R * ge.F.dp;
  ba.h_hess = R * hj.hess * Rt;
  ba.g_hess = R * ge.pf.g.hess * Rt;
  ba.dn_FA_nn = dFA[n - 1](n - 1, n - 1);
  ba.di_FA_in = Vec::Zero(n - 1 > 0 ? n - 1 : 0);
  for (int i = 0; i < n - 1; ++i) ba.di_FA_in(i) = dFA[i](i, n - 1);
  const double fa_norm = ge.F.dA.norm();
  ba.nu_FA_rel = fa_norm > 0 ? (ge.F.dA * normal).cwiseAbs().maxCoeff() / fa_norm : 0.0;

  // Closed forms.
  double quad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) quad += ba.F_A(i, j) * Psi(n - 1, j) * Psi(n - 1, i);
  ba.cf_ann = ba.g_n != 0.0 ? quad * ba.psi_nn * ba.v_n * (1.0 + ba.h) / ba.g_n : 0.0;
  ba.cf_dn_ann = ba.dn_FA_nn * ba.psi_nn * ba.psi_nn;
  double tang = 0.0;
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) tang += ba.F_A(i, j) * ba.psi_nn * ba.v_n * ba.h_hess(i, j);
  ba.cf_bn = tang + ba.F_p(n - 1) * ba.psi_nn - ba.F / ba.v_n;
  double mixed = 0.0;
  for (int i = 0; i < n - 1; ++i) mixed += ba.di_FA_in(i);
  ba.cf_fichera = ba.cf_bn - 2.0 * mixed * ba.psi_nn - ba.cf_dn_ann;
  return ba;
}

double gcf_fichera_bound(const OperatorSpec& spec, const std::vector<double>& g_tangential, double g_n,
                         double psi_nn, double v_n) {
  require(spec.mode() == FlowMode::GaussFlow, ErrorCode::InvalidArgument, "Fichera bound is for the Gauss flow");
  require(static_cast<int>(g_tangential.size()) == spec.dim() - 1, ErrorCode::InvalidArgument,
          "Fichera bound: n-1 tangential second derivatives required");
  if (!(v_n < 0.0) || !(g_n > 0.0)) {
    std::ostringstream os;
    os << "Fichera bound needs v_n < 0 and g_n > 0 (got v_n = " << v_n << ", g_n = " << g_n << ")";
    fail(ErrorCode::FramePrecondition, os.str());
  }
  double prod = 1.0;
  for (double gii : g_tangential) {
    require(gii > 0.0, ErrorCode::FramePrecondition, "Fichera bound needs positive tangential g_ii");
    prod *= gii;
  }
  const int n = spec.dim();
  const double a = spec.alpha();
  return a * (2.0 * n - 1.0) / std::pow(spec.sigma(), a) * std::pow(prod, a) * std::pow(g_n * g_n, a - 1.0) *
         psi_nn * psi_nn * v_n;
}

double gcf_fichera_bound(const OperatorSpec& spec, const BoundaryAnalysis& ba) {
  const int n = spec.dim();
  std::vector<double> gt;
  for (int i = 0; i < n - 1; ++i) gt.push_back(ba.g_hess(i, i));
  return gcf_fichera_bound(spec, gt, ba.g_n, ba.psi_nn, ba.v_n);
}

// ----------------------------------------------------------------------------

ConditionReport audit_conditions(const LinearCoefficients& interior, const std::vector<BoundaryAnalysis>& boundary,
                                 const AuditTolerances& tol) {
  ConditionReport rep;
  double a_scale = 0.0, b_scale = 0.0;
  for (const auto& c : interior.coeffs) {
    a_scale = std::max(a_scale, c.a.norm());
    b_scale = std::max(b_scale, c.b.norm());
  }
  for (const auto& ba : boundary) {
    a_scale = std::max(a_scale, ba.a_norm);
    b_scale = std::max({b_scale, ba.b.norm(), std::abs(ba.div_a_n)});
  }
  rep.a_scale = a_scale;
  rep.min_E = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < interior.coeffs.size(); ++k) {
    const Mat& a = interior.coeffs[k].a;
    const Eigen::MatrixXd ad = a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, Eigen::EigenvaluesOnly);
    NodeMargins nm;
    nm.x = interior.nodes[k];
    nm.E = es.eigenvalues().minCoeff();
    rep.min_E = std::min(rep.min_E, nm.E);
    rep.nodes.push_back(nm);
  }
  rep.max_A = 0.0;
  rep.max_B = -std::numeric_limits<double>::infinity();
  rep.max_A2 = -std::numeric_limits<double>::infinity();
  for (const auto& ba : boundary) {
    const int n = static_cast<int>(ba.a.rows());
    NodeMargins nm;
    nm.x = ba.x;
    nm.boundary = true;
    nm.A = a_scale > 0 ? std::abs(ba.a(n - 1, n - 1)) / a_scale : 0.0;
    nm.B = ba.fichera;
    nm.A2 = ba.dn_ann;
    rep.max_A = std::max(rep.max_A, nm.A);
    rep.max_B = std::max(rep.max_B, nm.B);
    rep.max_A2 = std::max(rep.max_A2, nm.A2);
    rep.nodes.push_back(nm);
  }
  const double margin = tol.strict ? tol.fichera_margin * std::max(1.0, b_scale) : 0.0;
  rep.pass_E = interior.coeffs.empty() || rep.min_E > 0.0;
  rep.pass_A = rep.max_A <= tol.tol_A;
  rep.pass_B = boundary.empty() || rep.max_B < -margin;
  rep.pass_A2 = boundary.empty() || rep.max_A2 < -margin;
  rep.pass = rep.pass_E && rep.pass_A && rep.pass_B && rep.pass_A2;
  return rep;
}

}  // namespace fbflow
