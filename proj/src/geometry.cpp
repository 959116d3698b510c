#include "ddimdp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ddimdp/error.hpp"
#include "ddimdp/kernels.hpp"
#include "ddimdp/lp.hpp"

namespace ddimdp {
namespace {

// A corner this far outside every part means the uncovered remainder contains
// a ball far larger than kEpsGeom, so the LP path can be skipped.
constexpr double kClearlyOutside = 1e-6;

void require_same_dim(int a, int b, const char* where) {
  if (a != b) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : low(std::move(lo)), high(std::move(hi)) {
  require_same_dim(static_cast<int>(low.size()), static_cast<int>(high.size()), "Box");
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (!(low(i) <= high(i))) throw Error(ErrorKind::invalid_config, "Box: low > high on axis " + std::to_string(i));
  }
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (x(i) < low(i) - tol || x(i) > high(i) + tol) return false;
  }
  return true;
}

std::vector<Eigen::VectorXd> Box::corners() const {
  const int n = dim();
  std::vector<Eigen::VectorXd> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = (mask >> i) & 1u ? high(i) : low(i);
    out.push_back(std::move(v));
  }
  return out;
}

HPolytope::HPolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  if (normals_.rows() != offsets_.size()) {
    throw Error(ErrorKind::dimension_mismatch, "HPolytope: normals/offsets row count differs");
  }
  for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
    if (normals_.row(i).squaredNorm() == 0.0) {
      throw Error(ErrorKind::invalid_config, "HPolytope: zero normal in row " + std::to_string(i));
    }
  }
}

HPolytope::HPolytope(const Box& box) {
  const int n = box.dim();
  normals_ = Eigen::MatrixXd::Zero(2 * n, n);
  offsets_.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    normals_(2 * i, i) = 1.0;
    offsets_(2 * i) = box.high(i);
    normals_(2 * i + 1, i) = -1.0;
    offsets_(2 * i + 1) = -box.low(i);
  }
}

double HPolytope::max_violation(const Eigen::VectorXd& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < normals_.rows(); ++i) {
    worst = std::max(worst, normals_.row(i).dot(x) - offsets_(i));
  }
  return worst;
}

HPolytope HPolytope::with_halfspace(const Eigen::VectorXd& normal, double offset) const {
  Eigen::MatrixXd n(normals_.rows() + 1, normal.size());
  Eigen::VectorXd o(offsets_.size() + 1);
  if (normals_.rows() > 0) {
    require_same_dim(static_cast<int>(normals_.cols()), static_cast<int>(normal.size()), "with_halfspace");
    n.topRows(normals_.rows()) = normals_;
    o.head(offsets_.size()) = offsets_;
  }
  n.row(normals_.rows()) = normal.transpose();
  o(offsets_.size()) = offset;
  return HPolytope(std::move(n), std::move(o));
}

HPolytope affine_image(const HPolytope& poly, const Eigen::MatrixXd& M, const Eigen::VectorXd& t) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::singular_transform, "affine_image: non-square matrix");
  require_same_dim(poly.dim(), static_cast<int>(M.cols()), "affine_image");
  require_same_dim(poly.dim(), static_cast<int>(t.size()), "affine_image");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) {
    throw Error(ErrorKind::singular_transform, "affine_image: matrix is singular");
  }
  const Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd normals = poly.normals() * inv;
  Eigen::VectorXd offsets = poly.offsets() + normals * t;
  return HPolytope(std::move(normals), std::move(offsets));
}

HPolytope intersect(const HPolytope& a, const HPolytope& b, bool prune) {
  require_same_dim(a.dim(), b.dim(), "intersect");
  Eigen::MatrixXd n(a.num_halfspaces() + b.num_halfspaces(), a.dim());
  Eigen::VectorXd o(a.num_halfspaces() + b.num_halfspaces());
  n << a.normals(), b.normals();
  o << a.offsets(), b.offsets();
  HPolytope out(std::move(n), std::move(o));
  return prune ? remove_redundant(out) : out;
}

HPolytope remove_redundant(const HPolytope& poly) {
  std::vector<int> kept;
  for (int i = 0; i < poly.num_halfspaces(); ++i) kept.push_back(i);
  for (int i = 0; i < poly.num_halfspaces(); ++i) {
    std::vector<int> others;
    for (int k : kept) {
      if (k != i) others.push_back(k);
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(others.size()), poly.dim());
    Eigen::VectorXd b(static_cast<Eigen::Index>(others.size()));
    for (std::size_t r = 0; r < others.size(); ++r) {
      A.row(static_cast<Eigen::Index>(r)) = poly.normals().row(others[r]);
      b(static_cast<Eigen::Index>(r)) = poly.offsets()(others[r]);
    }
    const auto res = lp::maximize(A, b, poly.normals().row(i).transpose());
    if (res.status == lp::Status::infeasible) break;
    if (res.status == lp::Status::optimal && res.value <= poly.offsets()(i) + lp::kFeasibilityTol) {
      kept.erase(std::find(kept.begin(), kept.end(), i));
    }
  }
  Eigen::MatrixXd n(static_cast<Eigen::Index>(kept.size()), poly.dim());
  Eigen::VectorXd o(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    n.row(static_cast<Eigen::Index>(r)) = poly.normals().row(kept[r]);
    o(static_cast<Eigen::Index>(r)) = poly.offsets()(kept[r]);
  }
  return HPolytope(std::move(n), std::move(o));
}

ChebyshevResult chebyshev(const HPolytope& poly) {
  const int n = poly.dim();
  const int m = poly.num_halfspaces();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  for (int i = 0; i < m; ++i) {
    A.row(i).head(n) = poly.normals().row(i);
    A(i, n) = poly.normals().row(i).norm();
    b(i) = poly.offsets()(i);
  }
  A(m, n) = -1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(n) = 1.0;

  const auto res = lp::maximize(A, b, c);
  ChebyshevResult out;
  if (res.status == lp::Status::infeasible) return out;
  if (res.status == lp::Status::unbounded) {
    throw Error(ErrorKind::unbounded_polytope, "chebyshev: inscribed radius is unbounded");
  }
  out.feasible = true;
  out.center = res.x.head(n);
  out.radius = std::max(0.0, res.x(n));
  return out;
}

std::vector<HPolytope> region_difference(const HPolytope& poly, std::span<const HPolytope> subtrahends,
                                         double eps) {
  std::vector<HPolytope> pieces;
  if (!chebyshev(poly).has_interior(eps)) return pieces;
  pieces.push_back(poly);

  for (const HPolytope& sub : subtrahends) {
    require_same_dim(poly.dim(), sub.dim(), "region_difference");
    std::vector<HPolytope> next;
    for (const HPolytope& piece : pieces) {
      if (!chebyshev(intersect(piece, sub)).has_interior(eps)) {
        next.push_back(piece);
        continue;
      }
      HPolytope inside = piece;
      for (int j = 0; j < sub.num_halfspaces(); ++j) {
        const Eigen::VectorXd a = sub.normals().row(j).transpose();
        const double b = sub.offsets()(j);
        HPolytope outside = inside.with_halfspace(-a, -b);
        if (chebyshev(outside).has_interior(eps)) next.push_back(std::move(outside));
        inside = inside.with_halfspace(a, b);
        if (!chebyshev(inside).has_interior(eps)) break;
      }
    }
    pieces = std::move(next);
    if (pieces.empty()) break;
  }
  return pieces;
}

bool box_covered_by_union(const Box& box, std::span<const HPolytope> parts, double eps) {
  const auto corners = box.corners();
  for (const HPolytope& part : parts) {
    require_same_dim(box.dim(), part.dim(), "box_covered_by_union");
    const bool all_in = std::all_of(corners.begin(), corners.end(),
                                    [&](const Eigen::VectorXd& v) { return part.contains(v); });
    if (all_in) return true;
  }
  for (const auto& v : corners) {
    const bool somewhere = std::any_of(parts.begin(), parts.end(), [&](const HPolytope& part) {
      return part.max_violation(v) <= kClearlyOutside;
    });
    if (!somewhere) return false;
  }
  return region_difference(HPolytope(box), parts, eps).empty();
}

std::vector<Eigen::Vector2d> vertices_2d(const HPolytope& poly) {
  if (poly.dim() != 2) throw Error(ErrorKind::dimension_mismatch, "vertices_2d: polytope is not planar");
  std::vector<Eigen::Vector2d> pts;
  const int m = poly.num_halfspaces();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Matrix2d M;
      M.row(0) = poly.normals().row(i);
      M.row(1) = poly.normals().row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d p = M.inverse() * Eigen::Vector2d(poly.offsets()(i), poly.offsets()(j));
      const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
      if (poly.max_violation(p) > 1e-9 * scale) continue;
      const bool dup = std::any_of(pts.begin(), pts.end(), [&](const Eigen::Vector2d& q) {
        return (q - p).cwiseAbs().maxCoeff() <= 1e-9 * scale;
      });
      if (!dup) pts.push_back(p);
    }
  }
  if (pts.size() < 3) return {};
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  return pts;
}

double polygon_area(std::span<const Eigen::Vector2d> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(twice);
}

Eigen::VectorXd max_violation_batch(const HPolytope& poly, const Eigen::MatrixXd& pts) {
  if (pts.cols() != poly.dim()) throw Error(ErrorKind::dimension_mismatch, "max_violation_batch: point dimension");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor normals = poly.normals();
  std::vector<const double*> axes(static_cast<std::size_t>(pts.cols()));
  for (Eigen::Index a = 0; a < pts.cols(); ++a) axes[static_cast<std::size_t>(a)] = pts.col(a).data();
  Eigen::VectorXd out(pts.rows());
  kernels::max_violation(normals.data(), poly.offsets().data(), poly.num_halfspaces(), poly.dim(), axes,
                         static_cast<std::size_t>(pts.rows()), out.data());
  return out;
}

}  // namespace ddimdp
