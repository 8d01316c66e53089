#pragma once

// The transformed operator G on a one-dimensional evolution grid: an interval
// in 1D or the radial coordinate of a ball. Derivatives of h come from
// second-order stencils; the first derivative is upwinded where the cell
// Peclet number exceeds one.

#include "fbflow/common.hpp"
#include "fbflow/fields.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/operators.hpp"
#include "fbflow/transform.hpp"

#include <memory>
#include <vector>

namespace fbflow {

enum class GridKind { Interval, Radial };

struct EvolveGrid {
  GridKind kind = GridKind::Interval;
  int dim = 1;         ///< ambient dimension
  double x0 = 0.0;     ///< first node (0 for radial)
  double dx = 0.0;
  bool free_lo = false;
  bool free_hi = true;
  std::vector<double> s;         ///< node coordinate
  std::vector<double> distance;  ///< distance to the nearest free end

  int size() const { return static_cast<int>(s.size()); }
  int last() const { return size() - 1; }
  Vec point(int j) const;
};

/// Interval domains map to an interval grid, disks and balls to a radial
/// grid on [0, R]. Other shapes are rejected.
EvolveGrid make_evolve_grid(const DomainSpec& domain);

enum class Stencil { Central, Backward, Forward };

struct NodeDerivs {
  double h = 0.0;
  double hs = 0.0;
  double hss = 0.0;
};

class GridOperator {
public:
  GridOperator(OperatorSpec spec, EvolveGrid grid, ScalarFieldPtr v);

  const OperatorSpec& spec() const { return spec_; }
  const EvolveGrid& grid() const { return grid_; }
  const ScalarField& profile() const { return *v_; }
  ScalarFieldPtr profile_ptr() const { return v_; }
  const Jet3& vjet(int j) const { return vjets_[j]; }

  NodeDerivs derivs(const std::vector<double>& h, int j, Stencil st) const;
  Jet2 jet(int j, const NodeDerivs& d) const;
  GEval eval(int j, const NodeDerivs& d) const;
  double G(const std::vector<double>& h, int j, Stencil st) const { return eval(j, derivs(h, j, st)).G; }

  /// dG/dh_ss and dG/dh_s at the node by central differences in the jet.
  std::pair<double, double> drift(int j, const NodeDerivs& d, double eps = 1e-5) const;

  /// Central unless the cell Peclet number |b| dx / (2a) exceeds one, then
  /// one-sided against the drift. End nodes are always one-sided.
  Stencil choose(const std::vector<double>& h, int j) const;

  /// h_ss + (n-1) h_s / r on radial grids.
  double laplacian(const std::vector<double>& h, int j) const;

  /// Image of the node under the collar map.
  Vec image(int j, double h) const { return map_point(grid_.point(j), h, vjets_[j]); }

private:
  OperatorSpec spec_;
  EvolveGrid grid_;
  ScalarFieldPtr v_;
  std::vector<Jet3> vjets_;
};

}  // namespace fbflow
