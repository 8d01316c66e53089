#pragma once

// Scalar fields with derivative jets: the reference profile v, static and
// moving pressure fields g(y, t), and collar fields h(x).

#include "fbflow/common.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fbflow {

class ScalarField {
public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual Jet3 jet(const Vec& x) const = 0;
  virtual double value(const Vec& x) const { return jet(x).value; }
  virtual std::string name() const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

/// amplitude * (1 - sum_i (x_i / a_i)^2)
class QuadraticProfile final : public ScalarField {
public:
  QuadraticProfile(double amplitude, Vec semi_axes);
  int dim() const override { return static_cast<int>(axes_.size()); }
  Jet3 jet(const Vec& x) const override;
  std::string name() const override { return "quadratic"; }

private:
  double amp_;
  Vec axes_;
};

/// f(|x|) with f(r) = sum_k c_k r^k. Smooth at the origin only when the odd
/// coefficients vanish.
class RadialPolynomial final : public ScalarField {
public:
  RadialPolynomial(int dim, std::vector<double> coeffs);
  int dim() const override { return dim_; }
  Jet3 jet(const Vec& x) const override;
  std::string name() const override { return "radial"; }
  /// f, f', f'', f''' at r.
  std::array<double, 4> profile(double r) const;

private:
  int dim_;
  std::vector<double> c_;
};

/// One-dimensional polynomial in s = anchor - x (or x - anchor when flipped).
class Polynomial1D final : public ScalarField {
public:
  Polynomial1D(double anchor, std::vector<double> coeffs, bool flipped = false);
  int dim() const override { return 1; }
  Jet3 jet(const Vec& x) const override;
  std::string name() const override { return "polynomial"; }

private:
  double anchor_;
  std::vector<double> c_;
  double sign_;
};

/// scale * f
class ScaledField final : public ScalarField {
public:
  ScaledField(ScalarFieldPtr base, double scale) : base_(std::move(base)), scale_(scale) {}
  int dim() const override { return base_->dim(); }
  Jet3 jet(const Vec& x) const override;
  std::string name() const override { return "scaled-" + base_->name(); }

private:
  ScalarFieldPtr base_;
  double scale_;
};

/// Radial jets from f, f', f'', f''' at x with r = |x|; the even-profile limit
/// is used at r = 0 (f'(0) = 0 and f''' (0) = 0 assumed).
Jet3 radial_jet(const Vec& x, const std::array<double, 4>& f);

// ----------------------------------------------------------------------------

/// g(y, t) on the moving domain.
class MovingField {
public:
  virtual ~MovingField() = default;
  virtual int dim() const = 0;
  virtual Jet2 jet(const Vec& y, double t) const = 0;
  virtual double value(const Vec& y, double t) const { return jet(y, t).value; }
  virtual std::string name() const = 0;
};

using MovingFieldPtr = std::shared_ptr<const MovingField>;

/// Time-independent g(y) = f(y).
class StaticField final : public MovingField {
public:
  explicit StaticField(ScalarFieldPtr f) : f_(std::move(f)) {}
  int dim() const override { return f_->dim(); }
  Jet2 jet(const Vec& y, double) const override { return f_->jet(y); }
  double value(const Vec& y, double) const override { return f_->value(y); }
  std::string name() const override { return "static-" + f_->name(); }

private:
  ScalarFieldPtr f_;
};

/// Values on a uniform 1D grid, cubic B-spline interpolation, linear
/// continuation past the last nodes.
class GridField1D final : public MovingField {
public:
  GridField1D(double x0, double dx, std::vector<double> values);
  ~GridField1D() override;
  int dim() const override { return 1; }
  Jet2 jet(const Vec& y, double t) const override;
  std::string name() const override { return "grid1d"; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ----------------------------------------------------------------------------

/// Collar field h(x) with first and second derivatives.
class HField {
public:
  virtual ~HField() = default;
  virtual int dim() const = 0;
  virtual Jet2 jet(const Vec& x) const = 0;
};

using HFieldPtr = std::shared_ptr<const HField>;

class ZeroHField final : public HField {
public:
  explicit ZeroHField(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  Jet2 jet(const Vec&) const override { return Jet2::zero(dim_); }

private:
  int dim_;
};

class FunctionHField final : public HField {
public:
  FunctionHField(int dim, std::function<Jet2(const Vec&)> f) : dim_(dim), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  Jet2 jet(const Vec& x) const override { return f_(x); }

private:
  int dim_;
  std::function<Jet2(const Vec&)> f_;
};

}  // namespace fbflow
