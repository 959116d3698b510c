#pragma once

#include <Eigen/Dense>

namespace ddimdp::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

inline constexpr double kFeasibilityTol = 1e-9;

// maximize c.x subject to A x <= b with x free.
//
// Dense two-phase tableau simplex using Bland's rule for both the entering and
// the leaving variable, so the pivot sequence is deterministic and cannot
// cycle. Intended for the small problems produced by the geometry kernel
// (a handful of variables, tens of rows).
Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace ddimdp::lp
