#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ddimdp/abstraction.hpp"
#include "ddimdp/dynamics.hpp"
#include "ddimdp/synthesis.hpp"

namespace ddimdp {

enum class Outcome { reached_goal, hit_unsafe, left_domain, uncontrolled, timed_out };

const char* to_string(Outcome o);

struct Decision {
  enum class Kind { control, done, failed };
  Kind kind = Kind::failed;
  Outcome reason = Outcome::uncontrolled;  // for done/failed
  std::size_t state = 0;
  std::int64_t action = kNoAction;
  ControlChoice choice;  // for control
};

// Feedback refinement of an abstract policy: at time k in cell R(x) apply
// u*(x, C_r) for the policy's action r.
class Controller {
 public:
  Controller(Policy policy, TargetCover cover, PartitionGrid grid, AffineSystem sys, StateLabels labels);

  int horizon() const { return policy_.horizon(); }
  const PartitionGrid& grid() const { return grid_; }
  const AffineSystem& system() const { return sys_; }
  const StateLabels& labels() const { return labels_; }
  const Policy& policy() const { return policy_; }

  Decision decide(const Eigen::VectorXd& x, int k) const;
  // Throws uncontrolled_state unless decide() yields an input.
  ControlChoice operator()(const Eigen::VectorXd& x, int k) const;

 private:
  Policy policy_;
  TargetCover cover_;
  PartitionGrid grid_;
  AffineSystem sys_;
  StateLabels labels_;
  std::vector<Eigen::VectorXd> refs_;
};

Controller refine_controller(const Policy& policy, const TargetCover& cover, const PartitionGrid& grid,
                             const AffineSystem& sys, const StateLabels& labels);

struct TrajectoryRecord {
  std::vector<Eigen::VectorXd> states;  // x_0 .. x_T, T <= K
  std::vector<Eigen::VectorXd> inputs;  // u_0 .. u_{T-1}
  std::vector<int> branches;            // 1-based reference position per step
  std::vector<std::int64_t> actions;
  std::vector<std::size_t> abstract_states;  // R(x_t)
  bool satisfied = false;
  Outcome outcome = Outcome::timed_out;
};

TrajectoryRecord simulate_trajectory(const Controller& ctrl, const Eigen::VectorXd& x0, NoiseSource& noise);

struct ValidationSummary {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // 3 sqrt(p(1-p)/runs)
};

// Run i draws its noise from noise.substream(i).
ValidationSummary monte_carlo_validate(const Controller& ctrl, const Eigen::VectorXd& x0, std::size_t runs,
                                       const NoiseSource& noise);

}  // namespace ddimdp
