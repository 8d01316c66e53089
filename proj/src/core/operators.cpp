#include "fbflow/operators.hpp"

#include <cmath>
#include <sstream>

namespace fbflow {

namespace {

// u in [-kUTol, 0) is treated as 0: boundary states built from rounded
// geometry land a few ulps on either side of zero.
constexpr double kUTol = 1e-12;
constexpr double kNormFloor = 1e-300;

double clamp_u(double u) {
  require(u >= -kUTol, ErrorCode::InvalidState, "operator evaluated at negative u");
  return u < 0.0 ? 0.0 : u;
}

double pow_norm(double s, double e) { return std::exp(e * std::log(std::max(s, kNormFloor))); }

double det_small(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  if (n == 0) return 1.0;
  if (n == 1) return A(0, 0);
  if (n == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return A.fullPivLu().determinant();
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvalidConfig: return "invalid configuration";
    case ErrorCode::InvalidState: return "invalid state";
    case ErrorCode::Transversality: return "transversality lost";
    case ErrorCode::DiffeomorphismBreakdown: return "diffeomorphism breakdown";
    case ErrorCode::RootBracket: return "root not bracketed";
    case ErrorCode::MultipleRoots: return "multiple roots";
    case ErrorCode::FramePrecondition: return "frame precondition violated";
    case ErrorCode::CflViolation: return "CFL violation";
    case ErrorCode::NonFinite: return "non-finite value";
    case ErrorCode::Convexity: return "convexity lost";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

Eigen::MatrixXd cofactor(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  require(A.cols() == n && n >= 1 && n <= kMaxDim + 1, ErrorCode::InvalidArgument,
          "cofactor: square matrix of size 1..5 required");
  Eigen::MatrixXd C(n, n);
  if (n == 1) {
    C(0, 0) = 1.0;
    return C;
  }
  if (n == 2) {
    C << A(1, 1), -A(1, 0), -A(0, 1), A(0, 0);
    return C;
  }
  Eigen::MatrixXd minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc) = A(r, c);
          ++cc;
        }
        ++rr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      C(i, j) = sign * det_small(minor);
    }
  }
  return C;
}

double validate_gauss_parameters(int dim, double alpha) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidConfig, "dimension must be in 1..4");
  if (!(alpha > 1.0 / dim)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " must exceed 1/n = " << 1.0 / dim
       << " (necessary for the flat side to persist)";
    fail(ErrorCode::InvalidConfig, os.str());
  }
  const double sigma = dim - 1.0 / alpha;
  const double ratio = 2.0 / sigma;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "sigma = n - 1/alpha = " << sigma << " gives 2/sigma = " << ratio
       << ", which must be a positive integer for smoothness up to the free boundary";
    fail(ErrorCode::InvalidConfig, os.str());
  }
  return sigma;
}

OperatorSpec OperatorSpec::plaplacian(int dim, double p_exponent) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidConfig, "dimension must be in 1..4");
  require(p_exponent > 2.0, ErrorCode::InvalidConfig, "p-Laplacian exponent must satisfy p > 2");
  OperatorSpec s;
  s.mode_ = FlowMode::PLaplacian;
  s.dim_ = dim;
  s.p_exponent_ = p_exponent;
  return s;
}

OperatorSpec OperatorSpec::gauss_flow(int dim, double alpha) {
  OperatorSpec s;
  s.mode_ = FlowMode::GaussFlow;
  s.dim_ = dim;
  s.alpha_ = alpha;
  s.sigma_ = validate_gauss_parameters(dim, alpha);
  s.two_over_sigma_ = static_cast<int>(std::lround(2.0 / s.sigma_));
  return s;
}

OperatorSpec OperatorSpec::heat(int dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidConfig, "dimension must be in 1..4");
  OperatorSpec s;
  s.mode_ = FlowMode::Heat;
  s.dim_ = dim;
  return s;
}

std::string OperatorSpec::name() const {
  std::ostringstream os;
  if (mode_ == FlowMode::Heat)
    os << "heat(n=" << dim_ << ")";
  else if (mode_ == FlowMode::PLaplacian)
    os << "plaplacian(n=" << dim_ << ", p=" << p_exponent_ << ")";
  else
    os << "gcf(n=" << dim_ << ", alpha=" << alpha_ << ", sigma=" << sigma_ << ")";
  return os.str();
}

void OperatorSpec::check_args(const Mat& A, const Vec& p, double u) const {
  require(A.rows() == dim_ && A.cols() == dim_ && p.size() == dim_, ErrorCode::InvalidArgument,
          "operator arguments have wrong dimension");
  require(std::isfinite(u) && A.allFinite() && p.allFinite(), ErrorCode::NonFinite,
          "operator arguments not finite");
}

double OperatorSpec::gcf_det(const Mat& A, const Vec& p, double u) const {
  const Eigen::MatrixXd Ad = A;
  const double detA = det_small(Ad);
  const Eigen::MatrixXd adj = cofactor(Ad).transpose();
  const Eigen::VectorXd pd = p;
  return u * detA + (1.0 / sigma_) * pd.dot(adj * pd);
}

double OperatorSpec::eval(const Mat& A, const Vec& p, double u) const {
  return partials(A, p, u).value;
}

OperatorPartials OperatorSpec::partials(const Mat& A, const Vec& p, double u_in) const {
  check_args(A, p, u_in);
  const double u = clamp_u(u_in);
  const int n = dim_;
  OperatorPartials out;
  out.dA = Mat::Zero(n, n);
  out.dp = Vec::Zero(n);

  if (mode_ == FlowMode::Heat) {
    out.value = A.trace();
    out.dA = Mat::Identity(n, n);
    return out;
  }
  if (mode_ == FlowMode::PLaplacian) {
    const double pe = p_exponent_;
    const double c = (pe - 2.0) / (pe - 1.0);
    const double s = p.norm();
    const double trA = A.trace();
    if (s == 0.0) {
      // Every term carries a positive power of |p|; first-order partials in p
      // are taken as their p >= 3 limit.
      out.value = 0.0;
      return out;
    }
    const Vec ph = p / s;
    const double q = ph.dot(A * ph);
    const double P2 = pow_norm(s, pe - 2.0);
    const double bracket = trA + (pe - 2.0) * q;
    out.value = c * u * P2 * bracket + pow_norm(s, pe);
    out.dA = c * u * P2 * (Mat::Identity(n, n) + (pe - 2.0) * ph * ph.transpose());
    out.du = c * P2 * bracket;
    const Vec Aph = A * ph;
    out.dp = c * u * (pe - 2.0) * pow_norm(s, pe - 3.0) * (ph * bracket + 2.0 * (Aph - q * ph)) +
             pe * pow_norm(s, pe - 1.0) * ph;
    return out;
  }

  // GaussFlow.
  const Eigen::MatrixXd Ad = A;
  const Eigen::VectorXd pd = p;
  const double detA = det_small(Ad);
  const Eigen::MatrixXd cofA = cofactor(Ad);
  const Eigen::MatrixXd adjA = cofA.transpose();
  const double inv_sigma = 1.0 / sigma_;
  const double quad = pd.dot(adjA * pd);
  const double D = u * detA + inv_sigma * quad;
  const double scale = std::max({1.0, std::abs(u * detA), std::abs(inv_sigma * quad)});
  if (D < -1e-13 * scale) {
    std::ostringstream os;
    os << "det B = " << D << " < 0 (loss of convexity)";
    fail(ErrorCode::InvalidState, os.str());
  }
  const double Dc = std::max(D, 0.0);

  // d(p^T adj(A) p)/dA = -cof(bordered)[0:n, 0:n] with bordered = [[A, p], [p^T, 0]].
  Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = Ad;
  bordered.topRightCorner(n, 1) = pd;
  bordered.bottomLeftCorner(1, n) = pd.transpose();
  const Eigen::MatrixXd cofBd = cofactor(bordered);
  const Eigen::MatrixXd dD_dA = u * cofA - inv_sigma * cofBd.topLeftCorner(n, n);
  const Eigen::VectorXd dD_dp = 2.0 * inv_sigma * (adjA * pd);
  const double dD_du = detA;

  const int m = two_over_sigma_;
  const double k = ((n + 2) * alpha_ - 1.0) / 2.0;
  const double p2 = pd.squaredNorm();
  const double um = std::pow(u, m);
  const double Q = 1.0 + um * p2;
  const double Qmk = std::pow(Q, -k);
  const double dQ_du = m * (m == 1 ? 1.0 : std::pow(u, m - 1)) * p2;

  const double Da = std::pow(Dc, alpha_);
  double Da1 = 0.0;  // alpha D^{alpha-1}
  if (Dc > 0.0) {
    Da1 = alpha_ * std::pow(Dc, alpha_ - 1.0);
  } else if (alpha_ == 1.0) {
    Da1 = 1.0;
  } else if (alpha_ < 1.0) {
    fail(ErrorCode::InvalidState, "det B = 0 with alpha < 1: partial derivatives unbounded");
  }

  out.value = Da * Qmk;
  out.dA = Mat(Qmk * Da1 * dD_dA);
  out.dp = Vec(Qmk * Da1 * dD_dp - k * Da * Qmk / Q * 2.0 * um * pd);
  out.du = Qmk * Da1 * dD_du - k * Da * Qmk / Q * dQ_du;
  return out;
}

// ----------------------------------------------------------------------------

GcfMatrix GcfMatrix::build(const OperatorSpec& spec, const Mat& A, const Vec& p, double u) {
  require(spec.mode() == FlowMode::GaussFlow, ErrorCode::InvalidArgument, "GcfMatrix needs GaussFlow");
  require(u > 0.0, ErrorCode::InvalidArgument, "GcfMatrix::build needs u > 0");
  const int n = spec.dim();
  GcfMatrix g;
  const double un = std::pow(u, 1.0 / n);
  g.B = un * A + (1.0 / spec.sigma()) * (un / u) * p * p.transpose();
  g.B = 0.5 * (g.B + g.B.transpose()).eval();
  g.B_prime = g.B.topLeftCorner(n - 1, n - 1);
  g.Y = g.B.block(n - 1, 0, 1, n - 1).transpose();
  return g;
}

double GcfMatrix::det_direct() const {
  const Eigen::MatrixXd Bd = B;
  return det_small(Bd);
}

double GcfMatrix::det_schur() const {
  const auto n = B.rows();
  if (n == 1) return B(0, 0);
  const Eigen::MatrixXd Bp = B_prime;
  const Eigen::VectorXd y = Y;
  const Eigen::VectorXd z = Bp.fullPivLu().solve(y);
  return (B(n - 1, n - 1) - y.dot(z)) * det_small(Bp);
}

// ----------------------------------------------------------------------------

namespace {

struct Leading {
  double product, normal, mixed;
};

Leading leading_terms(const OperatorSpec& spec, const Mat& A, const Vec& p, double u) {
  const int n = spec.dim();
  const double inv_sigma = 1.0 / spec.sigma();
  Leading L{};
  double prod_all = 1.0;
  for (int i = 0; i < n; ++i) prod_all *= A(i, i);
  L.product = u * prod_all;
  double prod_tan = 1.0;
  for (int i = 0; i < n - 1; ++i) prod_tan *= A(i, i);
  L.normal = inv_sigma * prod_tan * p(n - 1) * p(n - 1);
  double mixed = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    double pr = 1.0;
    for (int k = 0; k < n - 1; ++k)
      if (k != i) pr *= A(k, k);
    mixed += pr * (A(i, n - 1) + A(n - 1, i)) * p(i) * p(n - 1);
  }
  L.mixed = -inv_sigma * mixed;
  return L;
}

double remainder_at(const OperatorSpec& spec, const Mat& A, const Vec& p, double u) {
  const Leading L = leading_terms(spec, A, p, u);
  return spec.gcf_det(A, p, u) - (L.product + L.normal + L.mixed);
}

// dE/dA_ij by central differences; E is affine in each single entry of A.
double dE_dA(const OperatorSpec& spec, const Mat& A, const Vec& p, double u, int i, int j) {
  const double h = 1e-2;
  Mat Ap = A, Am = A;
  Ap(i, j) += h;
  Am(i, j) -= h;
  return (remainder_at(spec, Ap, p, u) - remainder_at(spec, Am, p, u)) / (2 * h);
}

}  // namespace

DetBDecomposition gcf_detB_decomposition(const OperatorSpec& spec, const Jet3& g, double tol,
                                         bool require_boundary_state) {
  require(spec.mode() == FlowMode::GaussFlow, ErrorCode::InvalidArgument,
          "det B decomposition needs the Gauss flow operator");
  const int n = spec.dim();
  require(g.dim() == n, ErrorCode::InvalidArgument, "jet dimension mismatch");
  const double scale = std::max(1.0, g.grad.norm() * g.grad.norm() * (1.0 + g.hess.norm()));
  if (require_boundary_state) {
    bool ok = std::abs(g.value) <= tol * scale;
    for (int i = 0; i < n - 1; ++i) {
      ok = ok && std::abs(g.grad(i)) <= tol * scale;
      for (int j = 0; j < n - 1; ++j)
        if (i != j) ok = ok && std::abs(g.hess(i, j)) <= tol * scale;
    }
    require(ok, ErrorCode::FramePrecondition,
            "det B decomposition requires g = 0, g_i = 0 (i < n) and diagonal tangential Hessian");
  }

  DetBDecomposition d;
  const Mat& A = g.hess;
  const Vec& p = g.grad;
  const double u = std::max(g.value, 0.0);
  const Leading L = leading_terms(spec, A, p, u);
  d.det_b = spec.gcf_det(A, p, u);
  d.leading_product = L.product;
  d.leading_normal = L.normal;
  d.leading_mixed = L.mixed;
  d.remainder = d.det_b - (L.product + L.normal + L.mixed);

  const double h = 1e-5;
  {
    Vec pp = p, pm = p;
    pp(n - 1) += h;
    pm(n - 1) -= h;
    d.dE_dpn = (remainder_at(spec, A, pp, u) - remainder_at(spec, A, pm, u)) / (2 * h);
  }
  for (int i = 0; i < n - 1; ++i)
    d.max_dE_dAii = std::max(d.max_dE_dAii, std::abs(dE_dA(spec, A, p, u, i, i)));

  // Spatial derivative along x_k of dE/dA_ij through (D^2 g, Dg, g)(x).
  auto along = [&](int k, int i, int j) {
    Mat Ak(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) Ak(a, b) = g.third[k](a, b);
    const Vec pk = g.hess.col(k);
    const double uk = g.grad(k);
    const double s = 1e-3;
    const double fp = dE_dA(spec, A + s * Ak, p + s * pk, u + s * uk, i, j);
    const double fm = dE_dA(spec, A - s * Ak, p - s * pk, u - s * uk, i, j);
    return (fp - fm) / (2 * s);
  };
  d.dn_dE_dAnn = along(n - 1, n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    d.max_di_dE_dAin = std::max(d.max_di_dE_dAin, std::abs(along(i, i, n - 1)));

  const double t = tol * scale;
  d.vanishing_ok = std::abs(d.remainder) <= t && std::abs(d.dE_dpn) <= t && d.max_dE_dAii <= t &&
                   std::abs(d.dn_dE_dAnn) <= t && d.max_di_dE_dAin <= t;
  return d;
}

}  // namespace fbflow
