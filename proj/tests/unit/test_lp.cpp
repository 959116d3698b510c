#include "doctest.h"

#include "ddimdp/lp.hpp"

using ddimdp::lp::maximize;
using ddimdp::lp::Status;

TEST_CASE("box LP attains the corner") {
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  Eigen::VectorXd b(4);
  b << 2, 1, 3, 0;
  const auto r = maximize(A, b, Eigen::Vector2d(1, 1));
  REQUIRE(r.status == Status::optimal);
  CHECK(r.value == doctest::Approx(5.0));
  CHECK(r.x(0) == doctest::Approx(2.0));
  CHECK(r.x(1) == doctest::Approx(3.0));
}

TEST_CASE("negative optimum with free variables") {
  // x >= 3, y >= -4 (as -x <= -3, -y <= 4); minimize x + y.
  Eigen::MatrixXd A(2, 2);
  A << -1, 0, 0, -1;
  Eigen::VectorXd b(2);
  b << -3, 4;
  const auto r = maximize(A, b, Eigen::Vector2d(-1, -1));
  REQUIRE(r.status == Status::optimal);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded programs") {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  Eigen::VectorXd b(2);
  b << 1, -2;  // x <= 1 and x >= 2
  CHECK(maximize(A, b, Eigen::VectorXd::Ones(1)).status == Status::infeasible);

  Eigen::MatrixXd B(1, 2);
  B << 1, 1;
  CHECK(maximize(B, Eigen::VectorXd::Ones(1), Eigen::Vector2d(1, 0)).status == Status::unbounded);
}

TEST_CASE("degenerate vertex does not cycle") {
  // Many constraints through the origin.
  Eigen::MatrixXd A(6, 2);
  A << 1, 1, 1, 2, 2, 1, -1, 0, 0, -1, 1, -1;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
  const auto r = maximize(A, b, Eigen::Vector2d(1, 1));
  REQUIRE(r.status == Status::optimal);
  CHECK(r.value == doctest::Approx(0.0));
}

TEST_CASE("equality via paired rows") {
  Eigen::MatrixXd A(4, 2);
  A << 1, 1, -1, -1, -1, 0, 0, -1;
  Eigen::VectorXd b(4);
  b << 1, -1, 0, 0;
  const auto r = maximize(A, b, Eigen::Vector2d(2, 1));
  REQUIRE(r.status == Status::optimal);
  CHECK(r.value == doctest::Approx(2.0));
}
