#pragma once

// Fixed reference domain: boundary nodes with normals and adapted frames,
// signed distance, collar sampling and the nondegeneracy audit of v.

#include "fbflow/common.hpp"
#include "fbflow/fields.hpp"

#include <string>
#include <vector>

namespace fbflow {

enum class Shape { Disk, Ellipse, Interval, Spline };

Shape parse_shape(const std::string& s);
const char* to_string(Shape s);

struct DomainConfig {
  int dimension = 2;
  Shape shape = Shape::Disk;
  double radius = 1.0;
  std::vector<double> semi_axes{2.0, 1.0};
  double lo = -1.0;
  double hi = 0.0;
  bool free_lo = false;
  bool free_hi = true;
  std::string spline_file;
  double grid_spacing = 1.0 / 64.0;
  double collar_width = 0.0;  ///< 0 selects 10 * grid_spacing
  int boundary_nodes = 0;     ///< 0 selects spacing <= grid_spacing
  bool strongly_convex = false;
};

struct BoundaryNode {
  Vec x;
  Vec normal;                      ///< outward unit normal
  Mat frame;                       ///< adapted rotation, frame * normal = e_n
  std::vector<double> curvatures;  ///< principal curvatures, descending
  double param = 0.0;              ///< curve parameter (2D) or end index (1D)
};

/// Foot point of the nearest-boundary projection.
struct Projection {
  Vec foot;
  Vec normal;
  double curvature = 0.0;  ///< 2D only
  double signed_distance = 0.0;
};

class DomainSpec {
public:
  int dim() const { return cfg_.dimension; }
  Shape shape() const { return cfg_.shape; }
  double grid_spacing() const { return cfg_.grid_spacing; }
  double collar_width() const { return collar_; }
  const DomainConfig& config() const { return cfg_; }
  const std::vector<BoundaryNode>& nodes() const { return nodes_; }

  /// Negative inside.
  double signed_distance(const Vec& x) const;
  Projection project(const Vec& x) const;
  bool inside(const Vec& x) const { return signed_distance(x) < 0.0; }

  /// Closed-curve parametrization (2D shapes): P, P', P'' at theta.
  std::array<Eigen::Vector2d, 3> curve(double theta) const;
  double curve_curvature(double theta) const;

private:
  friend DomainSpec build_domain(const DomainConfig&);
  DomainConfig cfg_;
  double collar_ = 0.0;
  std::vector<BoundaryNode> nodes_;
  // Trigonometric interpolant of the spline samples.
  std::vector<double> fx_cos_, fx_sin_, fy_cos_, fy_sin_;
  double fx0_ = 0.0, fy0_ = 0.0;
  // Dense closed polyline used to seed projections.
  std::vector<double> dense_theta_;
  std::vector<Eigen::Vector2d> dense_;
};

DomainSpec build_domain(const DomainConfig& cfg);

/// Rotation of minimal angle taking normal to e_n (a Householder reflection
/// when normal = -e_n). With tangential_hessian (the (n-1)x(n-1) second
/// derivatives of the boundary graph in the rotated frame) the tangential axes
/// are additionally rotated to diagonalize it; principal curvatures are sorted
/// descending and eigenvector signs fixed by first nonzero component positive.
Mat adapted_frame(const Vec& normal, const Mat* tangential_hessian = nullptr);

/// Frame for a boundary node; uses the curvature of the domain for the
/// tangential diagonalization in n >= 3.
Mat adapted_frame(const DomainSpec& domain, const BoundaryNode& node);

/// Collar sample: structured-grid nodes inside the domain within eta of the
/// boundary.
struct CollarNode {
  Vec x;
  double distance = 0.0;  ///< distance to the boundary (>= 0)
  enum Flag { Interior, BoundaryAdjacent, OuterEdge } flag = Interior;
};

struct CollarGrid {
  double eta = 0.0;
  double spacing = 0.0;
  std::vector<CollarNode> nodes;
};

CollarGrid build_collar(const DomainSpec& domain);

/// v = scale * (-signed distance), with jets from the curvature of the
/// boundary (2D) or exact (1D). Valid inside the collar.
class DistanceProfile final : public ScalarField {
public:
  DistanceProfile(DomainSpec domain, double scale) : domain_(std::move(domain)), scale_(scale) {}
  int dim() const override { return domain_.dim(); }
  Jet3 jet(const Vec& x) const override;
  std::string name() const override { return "distance"; }

private:
  Jet2 jet2(const Vec& x) const;
  DomainSpec domain_;
  double scale_;
};

struct NondegeneracyReport {
  double min_margin = 0.0;         ///< min of v + |grad v|^2 over sampled nodes
  double min_boundary_slope = 0.0; ///< min |grad v| over boundary nodes
  double threshold = 0.0;
  bool pass = false;
  std::vector<Vec> failures;       ///< nodes below threshold
};

NondegeneracyReport check_nondegeneracy(const ScalarField& v, const DomainSpec& domain, double c);

}  // namespace fbflow
