#pragma once

// Extension of the collar equation to the whole grid. Inside the collar the
// operator is G itself; deeper in, G is blended into kappa * Laplacian and a
// forcing built from an extended field htilde makes htilde an exact solution.

#include "fbflow/common.hpp"
#include "fbflow/grid_operator.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace fbflow {

/// 6u^5 - 15u^4 + 10u^3 on [0, 1], clamped outside.
double smoothstep5(double u);

/// Rises from 0 at distance lo to 1 at distance hi.
class Ramp {
public:
  Ramp(double lo, double hi);
  double operator()(double d) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

private:
  double lo_, hi_;
};

/// psi: 0 within eta/2 of the boundary, 1 beyond eta.
class CutoffProfile {
public:
  explicit CutoffProfile(double eta) : eta_(eta), ramp_(0.5 * eta, eta) {}
  double eta() const { return eta_; }
  double operator()(double d) const { return ramp_(d); }

private:
  double eta_;
  Ramp ramp_;
};

/// Throws InvalidConfig unless some point lies farther than eta from the
/// boundary.
CutoffProfile build_cutoff(double eta, double max_distance);

struct BlendSpec {
  double kappa = 1.0;        ///< diffusivity of the interior Laplacian
  double start = 1.0;        ///< chi rises on [start*eta, width*eta]
  double width = 1.5;
};

/// Interior values of htilde at time t. The collar entries of the returned
/// vector are copied from the current state.
class ExtensionSource {
public:
  virtual ~ExtensionSource() = default;
  virtual std::vector<double> fill(double t, const std::vector<double>& h) const = 0;
  virtual std::string name() const = 0;
};

using ExtensionSourcePtr = std::shared_ptr<const ExtensionSource>;

/// Linear interpolation between collar-edge values (constant across a ball,
/// or from the single collar edge of a half-open interval).
class HarmonicExtension final : public ExtensionSource {
public:
  HarmonicExtension(const EvolveGrid& grid, double eta);
  std::vector<double> fill(double t, const std::vector<double>& h) const override;
  std::string name() const override { return "harmonic"; }

private:
  EvolveGrid grid_;
  std::vector<char> collar_;
};

class ExactExtension final : public ExtensionSource {
public:
  ExactExtension(const EvolveGrid& grid, double eta, std::function<double(const Vec&, double)> h);
  std::vector<double> fill(double t, const std::vector<double>& h) const override;
  std::string name() const override { return "exact"; }

private:
  EvolveGrid grid_;
  std::vector<char> collar_;
  std::function<double(const Vec&, double)> h_;
};

// ----------------------------------------------------------------------------

/// h^(k) = d^k h / dt^k at t = 0 for the semi-discrete system h_t = G(h).
struct TaylorSeed {
  std::vector<std::vector<double>> coeffs;  ///< coeffs[k][j]
  std::vector<char> valid;                  ///< per node: all coefficients finite

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  double value(int j, double t) const;
  std::vector<double> at(double t) const;
};

/// G is differentiated along the solution by central differences in the
/// direction of the lower coefficients (step eps, 1e-4 for the second
/// variation). Nodes where G cannot be evaluated are marked invalid.
TaylorSeed taylor_seed(const GridOperator& G, const std::vector<double>& h0, int K, const std::vector<Stencil>& st,
                       double eps = 1e-5);

/// Taylor polynomial in the interior; harmonic fill where the seed is invalid.
class TaylorExtension final : public ExtensionSource {
public:
  TaylorExtension(const EvolveGrid& grid, double eta, TaylorSeed seed);
  std::vector<double> fill(double t, const std::vector<double>& h) const override;
  std::string name() const override { return "taylor"; }

private:
  TaylorSeed seed_;
  HarmonicExtension fallback_;
  std::vector<char> collar_;
};

// ----------------------------------------------------------------------------

class ExtendedOperator {
public:
  ExtendedOperator(std::shared_ptr<const GridOperator> G, double eta, BlendSpec blend, ExtensionSourcePtr source);

  const GridOperator& base() const { return *G_; }
  std::shared_ptr<const GridOperator> base_ptr() const { return G_; }
  const ExtensionSource& source() const { return *src_; }
  double eta() const { return psi_.eta(); }
  bool in_collar(int j) const { return collar_[j] != 0; }
  double psi(int j) const { return psi_(G_->grid().distance[j]); }
  double chi(int j) const { return chi_(G_->grid().distance[j]); }
  const BlendSpec& blend() const { return blend_; }

  /// Per-node stencils: chosen by drift on the collar, central elsewhere.
  std::vector<Stencil> stencils(const std::vector<double>& h) const;

  /// (1 - chi) G + chi kappa Laplacian; kappa Laplacian where G is undefined.
  double G_tilde(const std::vector<double>& w, int j, Stencil st) const;

  /// Diffusion and drift coefficients of Gtilde at node j.
  std::pair<double, double> coefficients(const std::vector<double>& w, int j, Stencil st) const;

  /// f = rate - Gtilde(htilde) off the collar, zero on it. rate is the time
  /// derivative of htilde over the step.
  std::vector<double> forcing(const std::vector<double>& rate, const std::vector<double>& htilde,
                              const std::vector<Stencil>& st) const;

  /// Ghat(w) = Gtilde(w) + psi f.
  std::vector<double> apply(const std::vector<double>& w, const std::vector<double>& f,
                            const std::vector<Stencil>& st) const;

private:
  std::shared_ptr<const GridOperator> G_;
  CutoffProfile psi_;
  Ramp chi_;
  BlendSpec blend_;
  ExtensionSourcePtr src_;
  std::vector<char> collar_;
};

std::vector<char> collar_mask(const EvolveGrid& grid, double eta);

/// Drift-selected stencils on the collar, central elsewhere and wherever the
/// drift cannot be evaluated.
std::vector<Stencil> choose_stencils(const GridOperator& G, const std::vector<double>& h,
                                     const std::vector<char>& collar);

}  // namespace fbflow
