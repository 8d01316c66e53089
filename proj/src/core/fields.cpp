#include "fbflow/fields.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <cmath>

namespace fbflow {

Jet2 rotate(const Jet2& jet, const Mat& R) {
  Jet2 out;
  out.value = jet.value;
  out.grad = R * jet.grad;
  out.hess = R * jet.hess * R.transpose();
  return out;
}

Jet3 rotate(const Jet3& jet, const Mat& R) {
  const int n = jet.dim();
  Jet3 out = Jet3::zero(n);
  static_cast<Jet2&>(out) = rotate(static_cast<const Jet2&>(jet), R);
  // T'_abc = R_ai R_bj R_ck T_ijk
  for (int c = 0; c < n; ++c) {
    Mat Tc = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) Tc += R(c, k) * jet.third[k];
    out.third[c] = R * Tc * R.transpose();
  }
  return out;
}

QuadraticProfile::QuadraticProfile(double amplitude, Vec semi_axes)
    : amp_(amplitude), axes_(std::move(semi_axes)) {
  require(axes_.size() >= 1 && axes_.size() <= kMaxDim, ErrorCode::InvalidArgument,
          "quadratic profile: 1..4 semi-axes required");
  require((axes_.array() > 0.0).all(), ErrorCode::InvalidArgument,
          "quadratic profile: semi-axes must be positive");
}

Jet3 QuadraticProfile::jet(const Vec& x) const {
  const int n = dim();
  Jet3 j = Jet3::zero(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ia2 = 1.0 / (axes_(i) * axes_(i));
    s += x(i) * x(i) * ia2;
    j.grad(i) = -2.0 * amp_ * x(i) * ia2;
    j.hess(i, i) = -2.0 * amp_ * ia2;
  }
  j.value = amp_ * (1.0 - s);
  return j;
}

Jet3 radial_jet(const Vec& x, const std::array<double, 4>& f) {
  const int n = static_cast<int>(x.size());
  Jet3 j = Jet3::zero(n);
  j.value = f[0];
  const double r = x.norm();
  if (r == 0.0) {
    j.hess = f[2] * Mat::Identity(n, n);
    return j;
  }
  const Vec e = x / r;
  const Mat P = Mat::Identity(n, n) - e * e.transpose();
  j.grad = f[1] * e;
  j.hess = f[2] * e * e.transpose() + (f[1] / r) * P;
  const double mix = f[2] / r - f[1] / (r * r);
  for (int k = 0; k < n; ++k) {
    Mat T(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        T(a, b) = f[3] * e(a) * e(b) * e(k) + mix * (P(a, k) * e(b) + e(a) * P(b, k) + P(a, b) * e(k));
    j.third[k] = T;
  }
  return j;
}

RadialPolynomial::RadialPolynomial(int dim, std::vector<double> coeffs) : dim_(dim), c_(std::move(coeffs)) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "radial profile: dimension 1..4");
  require(!c_.empty(), ErrorCode::InvalidArgument, "radial profile: empty coefficient list");
}

std::array<double, 4> RadialPolynomial::profile(double r) const {
  std::array<double, 4> f{0, 0, 0, 0};
  for (std::size_t k = 0; k < c_.size(); ++k) {
    const double kk = static_cast<double>(k);
    f[0] += c_[k] * std::pow(r, kk);
    if (k >= 1) f[1] += kk * c_[k] * std::pow(r, kk - 1);
    if (k >= 2) f[2] += kk * (kk - 1) * c_[k] * std::pow(r, kk - 2);
    if (k >= 3) f[3] += kk * (kk - 1) * (kk - 2) * c_[k] * std::pow(r, kk - 3);
  }
  return f;
}

Jet3 RadialPolynomial::jet(const Vec& x) const {
  require(x.size() == dim_, ErrorCode::InvalidArgument, "radial profile: dimension mismatch");
  return radial_jet(x, profile(x.norm()));
}

Polynomial1D::Polynomial1D(double anchor, std::vector<double> coeffs, bool flipped)
    : anchor_(anchor), c_(std::move(coeffs)), sign_(flipped ? 1.0 : -1.0) {
  require(!c_.empty(), ErrorCode::InvalidArgument, "polynomial profile: empty coefficient list");
}

Jet3 Polynomial1D::jet(const Vec& x) const {
  require(x.size() == 1, ErrorCode::InvalidArgument, "polynomial profile is one-dimensional");
  const double s = sign_ * (x(0) - anchor_);
  double f0 = 0, f1 = 0, f2 = 0, f3 = 0;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    const double kk = static_cast<double>(k);
    f0 += c_[k] * std::pow(s, kk);
    if (k >= 1) f1 += kk * c_[k] * std::pow(s, kk - 1);
    if (k >= 2) f2 += kk * (kk - 1) * c_[k] * std::pow(s, kk - 2);
    if (k >= 3) f3 += kk * (kk - 1) * (kk - 2) * c_[k] * std::pow(s, kk - 3);
  }
  Jet3 j = Jet3::zero(1);
  j.value = f0;
  j.grad(0) = sign_ * f1;
  j.hess(0, 0) = f2;
  j.third[0](0, 0) = sign_ * f3;
  return j;
}

Jet3 ScaledField::jet(const Vec& x) const {
  Jet3 j = base_->jet(x);
  j.value *= scale_;
  j.grad *= scale_;
  j.hess *= scale_;
  for (int k = 0; k < j.dim(); ++k) j.third[k] *= scale_;
  return j;
}

// ----------------------------------------------------------------------------

struct GridField1D::Impl {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
  double lo, hi;
};

GridField1D::GridField1D(double x0, double dx, std::vector<double> values) {
  require(values.size() >= 5, ErrorCode::InvalidArgument, "grid field needs at least 5 samples");
  require(dx > 0.0, ErrorCode::InvalidArgument, "grid field spacing must be positive");
  const double hi = x0 + dx * static_cast<double>(values.size() - 1);
  impl_ = std::make_unique<Impl>(Impl{
      boost::math::interpolators::cardinal_cubic_b_spline<double>(values.begin(), values.end(), x0, dx),
      x0, hi});
}

GridField1D::~GridField1D() = default;

Jet2 GridField1D::jet(const Vec& y, double) const {
  require(y.size() == 1, ErrorCode::InvalidArgument, "grid field is one-dimensional");
  Jet2 j = Jet2::zero(1);
  const double x = y(0);
  const auto& s = impl_->spline;
  if (x < impl_->lo || x > impl_->hi) {
    const double e = x < impl_->lo ? impl_->lo : impl_->hi;
    const double slope = s.prime(e);
    j.value = s(e) + slope * (x - e);
    j.grad(0) = slope;
    return j;
  }
  j.value = s(x);
  j.grad(0) = s.prime(x);
  j.hess(0, 0) = s.double_prime(x);
  return j;
}

}  // namespace fbflow
