#include "ddimdp/validation.hpp"

#include <cmath>

#include "ddimdp/error.hpp"
#include "ddimdp/parallel.hpp"

namespace ddimdp {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::reached_goal:
      return "goal";
    case Outcome::hit_unsafe:
      return "unsafe";
    case Outcome::left_domain:
      return "outside";
    case Outcome::uncontrolled:
      return "uncontrolled";
    case Outcome::timed_out:
      return "timeout";
  }
  return "unknown";
}

Controller::Controller(Policy policy, TargetCover cover, PartitionGrid grid, AffineSystem sys, StateLabels labels)
    : policy_(std::move(policy)),
      cover_(std::move(cover)),
      grid_(std::move(grid)),
      sys_(std::move(sys)),
      labels_(std::move(labels)) {
  if (labels_.kinds.size() != grid_.num_states()) {
    throw Error(ErrorKind::dimension_mismatch, "controller: labels do not match the grid");
  }
  for (const auto& row : policy_.action) {
    if (row.size() != grid_.num_states()) throw Error(ErrorKind::dimension_mismatch, "controller: policy size");
  }
  refs_.reserve(grid_.num_cells());
  for (std::size_t i = 0; i < grid_.num_cells(); ++i) refs_.push_back(grid_.reference(i));
}

Decision Controller::decide(const Eigen::VectorXd& x, int k) const {
  Decision d;
  d.state = grid_.state_of(x);
  switch (labels_.kinds[d.state]) {
    case StateKind::absorbing:
      d.reason = Outcome::left_domain;
      return d;
    case StateKind::unsafe:
      d.reason = Outcome::hit_unsafe;
      return d;
    case StateKind::goal:
      d.kind = Decision::Kind::done;
      d.reason = Outcome::reached_goal;
      return d;
    case StateKind::regular:
      break;
  }
  if (k < 0 || k >= horizon()) {
    d.reason = Outcome::timed_out;
    return d;
  }
  d.action = policy_.action[static_cast<std::size_t>(k)][d.state];
  if (d.action == kNoAction) return d;
  const auto& target = cover_.targets.at(static_cast<std::size_t>(d.action));
  std::vector<Eigen::VectorXd> refs;
  refs.reserve(target.size());
  for (std::size_t c : target) refs.push_back(refs_[c]);
  try {
    d.choice = u_star(sys_, x, refs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::action_not_applicable) throw;
    return d;
  }
  d.kind = Decision::Kind::control;
  return d;
}

ControlChoice Controller::operator()(const Eigen::VectorXd& x, int k) const {
  Decision d = decide(x, k);
  if (d.kind != Decision::Kind::control) {
    throw Error(ErrorKind::uncontrolled_state, "state " + std::to_string(d.state) + " at step " + std::to_string(k) +
                                                   " (" + to_string(d.reason) + ")");
  }
  return std::move(d.choice);
}

Controller refine_controller(const Policy& policy, const TargetCover& cover, const PartitionGrid& grid,
                             const AffineSystem& sys, const StateLabels& labels) {
  return Controller(policy, cover, grid, sys, labels);
}

TrajectoryRecord simulate_trajectory(const Controller& ctrl, const Eigen::VectorXd& x0, NoiseSource& noise) {
  const AffineSystem& sys = ctrl.system();
  TrajectoryRecord rec;
  Eigen::VectorXd x = x0;
  rec.states.push_back(x);
  for (int k = 0;; ++k) {
    Decision d = ctrl.decide(x, k);
    rec.abstract_states.push_back(d.state);
    if (d.kind == Decision::Kind::done) {
      rec.satisfied = true;
      rec.outcome = Outcome::reached_goal;
      return rec;
    }
    if (d.kind == Decision::Kind::failed) {
      rec.outcome = d.reason;
      return rec;
    }
    x = sys.A() * x + sys.B() * d.choice.u + noise.draw();
    rec.inputs.push_back(std::move(d.choice.u));
    rec.branches.push_back(d.choice.ell);
    rec.actions.push_back(d.action);
    rec.states.push_back(x);
  }
}

ValidationSummary monte_carlo_validate(const Controller& ctrl, const Eigen::VectorXd& x0, std::size_t runs,
                                       const NoiseSource& noise) {
  if (runs == 0) throw Error(ErrorKind::invalid_config, "runs must be at least 1");
  std::vector<char> ok(runs, 0);
  parallel_for(runs, [&](std::size_t i) {
    NoiseSource stream = noise.substream(i);
    ok[i] = simulate_trajectory(ctrl, x0, stream).satisfied ? 1 : 0;
  });
  ValidationSummary out;
  out.runs = runs;
  for (char c : ok) out.successes += static_cast<std::size_t>(c);
  out.p_hat = static_cast<double>(out.successes) / static_cast<double>(runs);
  out.ci_halfwidth = 3.0 * std::sqrt(out.p_hat * (1.0 - out.p_hat) / static_cast<double>(runs));
  return out;
}

}  // namespace ddimdp
