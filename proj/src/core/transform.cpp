#include "fbflow/transform.hpp"

#include "push_jets.hpp"

#include <cmath>
#include <sstream>

namespace fbflow {

namespace {

detail::PushT<double> push(const Jet2& h, const Jet3& v) {
  require(h.dim() == v.dim(), ErrorCode::InvalidArgument, "h-jet and v-jet dimensions differ");
  const detail::VecT<double> hg = h.grad;
  const detail::MatT<double> hh = h.hess;
  auto P = detail::push_jets<double>(h.value, hg, hh, v);
  if (!(std::abs(P.det_phi) > 1e-8)) {
    std::ostringstream os;
    os << "det Phi' = " << P.det_phi << " (collar map no longer a diffeomorphism)";
    fail(ErrorCode::DiffeomorphismBreakdown, os.str());
  }
  return P;
}

}  // namespace

TransformState jacobians(const Jet2& h, const Jet3& v) {
  const auto P = push(h, v);
  TransformState T;
  T.Phi = P.Phi;
  T.Psi = P.Psi;
  T.Psi2 = P.Psi2;
  T.det_phi = P.det_phi;
  return T;
}

PushForward pushforward(const Jet2& h, const Jet3& v, const Vec& x) {
  const auto P = push(h, v);
  PushForward out;
  out.T.Phi = P.Phi;
  out.T.Psi = P.Psi;
  out.T.Psi2 = P.Psi2;
  out.T.det_phi = P.det_phi;
  out.g.value = P.g;
  out.g.grad = P.dg;
  out.g.hess = 0.5 * (P.d2g + P.d2g.transpose());
  out.den = P.den;
  out.image = map_point(x, h.value, v);
  return out;
}

GEval transformed_G(const OperatorSpec& spec, const Jet2& h, const Jet3& v, const Vec& x) {
  GEval e;
  e.pf = pushforward(h, v, x);
  const double scale = std::max({1.0, std::abs(v.value), e.pf.g.grad.norm() * v.grad.norm()});
  if (!(std::abs(e.pf.den) > 1e-10 * scale)) {
    std::ostringstream os;
    os << "v + g_i v_i = " << e.pf.den << " (segments no longer transversal)";
    fail(ErrorCode::Transversality, os.str());
  }
  e.F = spec.partials(e.pf.g.hess, e.pf.g.grad, e.pf.g.value);
  e.G = e.F.value / e.pf.den;
  require(std::isfinite(e.G), ErrorCode::NonFinite, "transformed operator not finite");
  return e;
}

// ----------------------------------------------------------------------------

double solve_h(const Vec& x, double t, const MovingField& g, const ScalarField& v, const SolveOptions& opt) {
  require(opt.bracket > 0.0 && opt.scan >= 2, ErrorCode::InvalidArgument, "solve_h: bad options");
  const Jet3 vj = v.jet(x);
  require(std::hypot(vj.grad.norm(), vj.value) > 1e-12, ErrorCode::Transversality,
          "solve_h: transversal field V vanishes");
  auto r = [&](double h) { return (1.0 + h) * vj.value - g.value(x - h * vj.grad, t); };
  auto dr = [&](double h) { return vj.value + g.jet(x - h * vj.grad, t).grad.dot(vj.grad); };

  const double H = opt.bracket;
  std::vector<double> hs(opt.scan + 1), rs(opt.scan + 1);
  for (int k = 0; k <= opt.scan; ++k) {
    hs[k] = -H + 2.0 * H * k / opt.scan;
    rs[k] = r(hs[k]);
  }
  int changes = 0;
  int cell = -1;
  int exact = -1;
  for (int k = 0; k <= opt.scan; ++k) {
    if (rs[k] == 0.0) {
      ++changes;
      exact = k;
      continue;
    }
    if (k < opt.scan && rs[k + 1] != 0.0 && (rs[k] < 0) != (rs[k + 1] < 0)) {
      ++changes;
      cell = k;
    }
  }
  if (changes == 0) {
    std::ostringstream os;
    os << "no sign change of the segment residual on [" << -H << ", " << H << "] (transversality lost, shrink T)";
    fail(ErrorCode::RootBracket, os.str());
  }
  if (changes > 1) fail(ErrorCode::MultipleRoots, "segment meets the graph more than once (collar too wide)");
  if (exact >= 0) return hs[exact];
  double a = hs[cell], b = hs[cell + 1];
  double ra = rs[cell];

  double h = (std::isfinite(opt.warm_start) && opt.warm_start > a && opt.warm_start < b) ? opt.warm_start
                                                                                          : 0.5 * (a + b);
  double rh = r(h);
  const double scale = std::max(1.0, std::abs(vj.value));
  for (int it = 0; it < 200; ++it) {
    if ((rh < 0) == (ra < 0)) {
      a = h;
      ra = rh;
    } else {
      b = h;
    }
    const double d = dr(h);
    double hn = (d != 0.0 && std::isfinite(d)) ? h - rh / d : 0.5 * (a + b);
    if (!(hn > a && hn < b)) hn = 0.5 * (a + b);
    const double step = hn - h;
    h = hn;
    rh = r(h);
    if (rh == 0.0) break;
    if (std::abs(rh) <= opt.tol * scale && std::abs(step) <= 1e-15 * std::max(1.0, std::abs(h))) break;
    if (b - a <= 4e-16 * std::max(1.0, std::abs(h))) break;
  }
  if (!(std::abs(rh) <= opt.tol * scale)) {
    std::ostringstream os;
    os << "solve_h did not reach tolerance (|r| = " << std::abs(rh) << ")";
    fail(ErrorCode::RootBracket, os.str());
  }
  return h;
}

Jet2 SolvedHField::jet(const Vec& x) const {
  const int n = dim();
  const Jet3 v = v_->jet(x);
  Jet2 hj = Jet2::zero(n);
  const double h = solve_h(x, t_, *g_, *v_, opt_);
  hj.value = h;
  const Vec y = map_point(x, h, v);
  const Jet2 g = g_->jet(y, t_);
  const double den = v.value + g.grad.dot(v.grad);
  require(std::abs(den) > 1e-12, ErrorCode::Transversality, "implicit derivative of h: v + g_k v_k = 0");
  // h_i (v + g_k v_k) = g_i - h g_k v_ki - (1 + h) v_i
  hj.grad = (g.grad - h * (v.hess * g.grad) - (1.0 + h) * v.grad) / den;
  Mat Phi(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) Phi(i, l) = (i == l ? 1.0 : 0.0) - hj.grad(l) * v.grad(i) - h * v.hess(i, l);
  const Mat gPP = Phi.transpose() * g.hess * Phi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = hj.grad(i) * v.grad(j) + hj.grad(j) * v.grad(i) + (1.0 + h) * v.hess(i, j) - gPP(i, j);
      for (int k = 0; k < n; ++k)
        s += g.grad(k) * (hj.grad(i) * v.hess(k, j) + hj.grad(j) * v.hess(k, i) + h * v.third[k](i, j));
      hj.hess(i, j) = -s / den;
    }
  hj.hess = (0.5 * (hj.hess + hj.hess.transpose())).eval();
  return hj;
}

std::vector<Vec> recover_boundary(const DomainSpec& domain, const HField& h, const ScalarField& v) {
  std::vector<Vec> out;
  out.reserve(domain.nodes().size());
  for (const auto& b : domain.nodes()) {
    const Jet2 hj = h.jet(b.x);
    out.push_back(map_point(b.x, hj.value, v.jet(b.x)));
  }
  return out;
}

}  // namespace fbflow
