#include <random>

#include "doctest.h"

#include "ddimdp/error.hpp"
#include "ddimdp/geometry.hpp"
#include "support.hpp"

using namespace ddimdp;
using testing::box2;
using testing::v2;

using testing::random_polygon;

TEST_CASE("box basics") {
  const Box b = box2(0, 0, 2, 1);
  CHECK(b.contains(v2(2, 1)));
  CHECK_FALSE(b.contains(v2(2.1, 0.5)));
  const auto corners = b.corners();
  REQUIRE(corners.size() == 4);
  CHECK(corners[1].isApprox(v2(2, 0)));  // bit 0 selects high on axis 0
  CHECK(corners[3].isApprox(v2(2, 1)));
  CHECK(b.center().isApprox(v2(1, 0.5)));
}

TEST_CASE("box polytope and membership") {
  const HPolytope P(box2(-1, -1, 1, 1));
  CHECK(P.num_halfspaces() == 4);
  CHECK(P.contains(v2(1, 1)));
  CHECK(P.max_violation(v2(2, 0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(HPolytope(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Ones(1)), Error);
}

TEST_CASE("affine_image maps vertices") {
  const HPolytope P(box2(0, 0, 1, 1));
  Eigen::Matrix2d M;
  M << 2, 1, 0, 1;
  const HPolytope Q = affine_image(P, M, v2(1, -1));
  for (const auto& c : box2(0, 0, 1, 1).corners()) CHECK(Q.contains(M * c + v2(1, -1)));
  CHECK_FALSE(Q.contains(v2(0.9, -1)));
  CHECK(polygon_area(vertices_2d(Q)) == doctest::Approx(2.0));
  Eigen::Matrix2d S;
  S << 1, 2, 2, 4;
  CHECK_THROWS_AS(affine_image(P, S, v2(0, 0)), Error);
}

TEST_CASE("chebyshev radius") {
  const auto r = chebyshev(HPolytope(box2(0, 0, 4, 2)));
  REQUIRE(r.feasible);
  CHECK(r.radius == doctest::Approx(1.0));
  CHECK(r.center(1) == doctest::Approx(1.0));
  // Flat box: no interior.
  CHECK_FALSE(chebyshev(HPolytope(box2(0, 0, 1, 0))).has_interior());
  // Half-plane only: unbounded.
  Eigen::MatrixXd N(1, 2);
  N << 1, 0;
  CHECK_THROWS_AS(chebyshev(HPolytope(N, Eigen::VectorXd::Zero(1))), Error);
  // Empty.
  const HPolytope empty = intersect(HPolytope(box2(0, 0, 1, 1)), HPolytope(box2(2, 2, 3, 3)));
  CHECK_FALSE(chebyshev(empty).feasible);
}

TEST_CASE("remove_redundant keeps the facets") {
  HPolytope P(box2(0, 0, 1, 1));
  P = P.with_halfspace(v2(1, 1), 5.0);
  P = P.with_halfspace(v2(1, 0), 3.0);
  CHECK(remove_redundant(P).num_halfspaces() == 4);
}

TEST_CASE("region_difference of boxes") {
  const HPolytope A(box2(0, 0, 2, 2));
  const std::vector<HPolytope> sub{HPolytope(box2(1, 0, 3, 2))};
  const auto pieces = region_difference(A, sub);
  double area = 0.0;
  for (const auto& p : pieces) area += polygon_area(vertices_2d(p));
  CHECK(area == doctest::Approx(2.0));
  // Touching subtrahend removes nothing.
  const std::vector<HPolytope> touch{HPolytope(box2(2, 0, 3, 2))};
  CHECK(region_difference(A, touch).size() == 1);
  // Full cover removes everything.
  const std::vector<HPolytope> full{HPolytope(box2(-1, -1, 3, 3))};
  CHECK(region_difference(A, full).empty());
}

TEST_CASE("box_covered_by_union") {
  const Box cell = box2(0, 0, 1, 1);
  const std::vector<HPolytope> halves{HPolytope(box2(0, 0, 0.5, 1)), HPolytope(box2(0.5, 0, 1, 1))};
  CHECK(box_covered_by_union(cell, halves));
  const std::vector<HPolytope> gap{HPolytope(box2(0, 0, 0.5, 1)), HPolytope(box2(0.6, 0, 1, 1))};
  CHECK_FALSE(box_covered_by_union(cell, gap));
  // Corners all covered by different parts, centre not.
  const std::vector<HPolytope> corners{HPolytope(box2(-1, -1, 0.4, 0.4)), HPolytope(box2(0.6, -1, 2, 0.4)),
                                       HPolytope(box2(-1, 0.6, 0.4, 2)), HPolytope(box2(0.6, 0.6, 2, 2))};
  CHECK_FALSE(box_covered_by_union(cell, corners));
}

TEST_CASE("double-integrator Pre parallelogram vertices") {
  // {x : A x + B u = 0, u in [-2,4]x[-3,3]} with A = [[1,1],[0,1]], B = diag(0.5,1).
  Eigen::Matrix2d A, B;
  A << 1, 1, 0, 1;
  B << 0.5, 0, 0, 1;
  const HPolytope U(box2(-2, -3, 4, 3));
  const HPolytope pre = affine_image(U, -A.inverse() * B, v2(0, 0));
  const auto v = vertices_2d(pre);
  REQUIRE(v.size() == 4);
  // Vertex map: x = -A^-1 B u for each corner u of U.
  for (const auto& u : box2(-2, -3, 4, 3).corners()) {
    const Eigen::Vector2d x = -A.inverse() * B * u;
    bool found = false;
    for (const auto& p : v) found = found || (p - x).norm() < 1e-12;
    CHECK(found);
  }
  CHECK(polygon_area(v) == doctest::Approx(18.0));
}

TEST_CASE("region_difference agrees with sampled membership") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int inst = 0; inst < 20; ++inst) {
    const HPolytope P = random_polygon(rng);
    const std::vector<HPolytope> subs{random_polygon(rng), random_polygon(rng)};
    const auto pieces = region_difference(P, subs);
    int agree = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Vector2d x(u(rng), u(rng));
      const bool truth = P.contains(x, 0.0) && !subs[0].contains(x, 0.0) && !subs[1].contains(x, 0.0);
      bool got = false;
      for (const auto& p : pieces) got = got || p.contains(x, 0.0);
      agree += truth == got;
    }
    CHECK(agree >= trials - 4);
  }
}
