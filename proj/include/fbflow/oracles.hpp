#pragma once

// Exact and brute-force references: the planar traveling wave of the
// pressure equation, the self-similar source solution of the p-Laplacian
// evolution, and bisection for the segment relation.

#include "fbflow/common.hpp"
#include "fbflow/fields.hpp"

#include <string>
#include <vector>

namespace fbflow {

/// g(x, t) = a (a^{p-1} t - x_1), positive part when clipped.
class TravelingWave final : public MovingField {
public:
  TravelingWave(int dim, double a, double p, bool clipped = false);
  int dim() const override { return dim_; }
  Jet2 jet(const Vec& y, double t) const override;
  std::string name() const override { return "traveling-wave"; }

  double speed() const;
  double boundary(double t) const { return speed() * t; }
  double time_derivative(const Vec& y, double t) const;
  /// g_t - F(D^2 g, grad g, g) for the pressure equation.
  double residual(const Vec& y, double t) const;

private:
  int dim_;
  double a_, p_;
  bool clipped_;
};

struct BarenblattExponents {
  double alpha = 0.0;  ///< u = t^{-alpha} U(|x| t^{-beta})
  double beta = 0.0;
  double scaling_residual = 0.0;
};

/// Solves the two scaling relations (mass conservation and the balance of
/// time and space derivatives) for the exponents and checks them.
BarenblattExponents derive_barenblatt_exponents(int dim, double p);

class Barenblatt {
public:
  Barenblatt(int dim, double p, double mass);

  const BarenblattExponents& exponents() const { return ex_; }
  double C() const { return C_; }
  double q() const { return q_; }

  double u(double r, double t) const;
  double pressure(double r, double t) const;
  double support_radius(double t) const;
  /// u_t - div(|grad u|^{p-2} grad u) with analytic derivatives, relative to
  /// |u_t| + |div(...)|.
  double residual(double r, double t) const;
  /// Radial quadrature of u at time t.
  double mass(double t) const;

private:
  int n_;
  double p_;
  BarenblattExponents ex_;
  double gamma_, m_, q_, C_;
};

/// Root of (1 + h) v(x) = g(x - h grad v(x), t) in [lo, hi] by bisection to
/// an interval of width 1e-14.
double brute_force_h(const Vec& x, double t, const MovingField& g, const ScalarField& v, double lo, double hi);

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<OracleCheck> run_oracle_checks(unsigned long long seed = 1);

}  // namespace fbflow
