#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ddimdp {

inline constexpr double kEpsGeom = 1e-9;
inline constexpr double kMembershipTol = 1e-9;

// Axis-aligned box [low, high].
struct Box {
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);

  int dim() const { return static_cast<int>(low.size()); }
  Eigen::VectorXd center() const { return 0.5 * (low + high); }
  Eigen::VectorXd extent() const { return high - low; }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  // Corners in binary-counter order (bit i selects high on axis i).
  std::vector<Eigen::VectorXd> corners() const;
};

// Convex polytope {x : normals.row(i) . x <= offsets(i)}.
class HPolytope {
 public:
  HPolytope() = default;
  HPolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);
  explicit HPolytope(const Box& box);

  int dim() const { return static_cast<int>(normals_.cols()); }
  int num_halfspaces() const { return static_cast<int>(normals_.rows()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

  // Largest halfspace residual normal.x - offset; <= 0 means inside.
  double max_violation(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const {
    return max_violation(x) <= tol;
  }

  // Appends one halfspace; used when building pieces of a difference.
  HPolytope with_halfspace(const Eigen::VectorXd& normal, double offset) const;

 private:
  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
};

struct ChebyshevResult {
  bool feasible = false;
  Eigen::VectorXd center;
  double radius = 0.0;

  bool has_interior(double eps = kEpsGeom) const { return feasible && radius > eps; }
};

// {M x + t : x in P}. Throws ErrorKind::singular_transform when M is singular.
HPolytope affine_image(const HPolytope& poly, const Eigen::MatrixXd& M, const Eigen::VectorXd& t);

// Concatenates the halfspaces; with prune = true redundant rows are dropped.
HPolytope intersect(const HPolytope& a, const HPolytope& b, bool prune = false);

// Drops every row that is implied by the others (LP test, tolerance 1e-9).
HPolytope remove_redundant(const HPolytope& poly);

// Largest inscribed ball. Throws ErrorKind::unbounded_polytope if the radius
// is unbounded.
ChebyshevResult chebyshev(const HPolytope& poly);

// Splits poly \ (union of subtrahends) into interior-disjoint convex pieces.
// Subtrahends are processed in list order and each subtrahend's halfspaces in
// stored order; pieces whose Chebyshev radius is <= eps are dropped.
std::vector<HPolytope> region_difference(const HPolytope& poly, std::span<const HPolytope> subtrahends,
                                         double eps = kEpsGeom);

// True iff box \ (union of parts) has no interior.
bool box_covered_by_union(const Box& box, std::span<const HPolytope> parts, double eps = kEpsGeom);

// max_violation for every row of pts (one point per row), through the
// vectorized kernel.
Eigen::VectorXd max_violation_batch(const HPolytope& poly, const Eigen::MatrixXd& pts);

// Vertices of a bounded 2-D polytope in counter-clockwise order. Empty when the
// polytope is empty or degenerate.
std::vector<Eigen::Vector2d> vertices_2d(const HPolytope& poly);

double polygon_area(std::span<const Eigen::Vector2d> ccw_vertices);

}  // namespace ddimdp
