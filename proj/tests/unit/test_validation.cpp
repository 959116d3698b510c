#include "doctest.h"

#include "ddimdp/error.hpp"
#include "ddimdp/validation.hpp"
#include "support.hpp"

using namespace ddimdp;
using testing::box2;
using testing::v2;

namespace {

const GaussianNoise kZeroNoise{v2(0, 0), Eigen::Matrix2d::Zero()};

// Five cells in a row; each Pre set covers a cell and its neighbours.
struct Corridor {
  PartitionGrid grid{box2(0, 0, 5, 1), {5, 1}};
  AffineSystem sys{Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(), HPolytope(box2(-1.6, -1.6, 1.6, 1.6)),
                   box2(0, 0, 5, 1)};
  TargetCover cover = build_target_cover(grid, CoverScheme::singletons);
  StateLabels labels = make_labels(grid, {4}, {});
  RMDPModel model;
  SynthesisResult res;

  explicit Corridor(int K) {
    const auto table = compute_action_table(grid, cover, sys);
    model = build_rmdp(table, grid, cover, SampleBatch{Eigen::MatrixXd::Zero(50, 2)}, 1e-3, labels);
    res = robust_value_iteration(embed_imdp(model), K);
  }
};

}  // namespace

TEST_CASE("controller drives a reference exactly onto its target") {
  Corridor c(4);
  const Controller ctrl = refine_controller(c.res.policy, c.cover, c.grid, c.sys, c.labels);
  const Eigen::VectorXd x = c.grid.reference(0);
  const ControlChoice ch = ctrl(x, 0);
  const auto target = static_cast<std::size_t>(c.res.policy.action[0][PartitionGrid::state_of_cell(0)]);
  CHECK(ch.ell == 1);
  CHECK(nominal_next(c.sys, x, ch.u).isApprox(c.grid.reference(target)));
  // Goal cell: nothing left to do.
  CHECK(ctrl.decide(c.grid.reference(4), 0).kind == Decision::Kind::done);
  CHECK_THROWS_AS(ctrl(c.grid.reference(4), 0), Error);
  CHECK_THROWS_AS(ctrl(v2(-1, 0.5), 0), Error);
}

TEST_CASE("second-branch states use the second reference") {
  const PartitionGrid grid(box2(0, 0, 4, 4), {4, 4});
  const AffineSystem sys(Eigen::Matrix2d::Identity(), -Eigen::Matrix2d::Identity(), HPolytope(box2(0, 0.5, 1, 1.5)),
                         grid.domain());
  const auto cover = build_target_cover(grid, CoverScheme::axis_pairs);
  const std::vector<int> a{1, 1}, b{2, 1}, here{2, 2};
  const std::vector<std::size_t> pair{grid.flat_index(a), grid.flat_index(b)};
  std::int64_t id = -1;
  for (std::size_t r = 0; r < cover.size(); ++r)
    if (cover.targets[r] == pair) id = static_cast<std::int64_t>(r);
  REQUIRE(id >= 0);
  Policy policy;
  policy.action.assign(1, std::vector<std::int64_t>(grid.num_states(), kNoAction));
  policy.action[0][PartitionGrid::state_of_cell(grid.flat_index(here))] = id;
  const Controller ctrl(policy, cover, grid, sys, make_labels(grid, {}, {}));
  const auto right = ctrl(v2(2.7, 2.5), 0);
  CHECK(right.ell == 2);
  CHECK(nominal_next(sys, v2(2.7, 2.5), right.u).isApprox(grid.reference(pair[1])));
  const auto left = ctrl(v2(2.2, 2.5), 0);
  CHECK(left.ell == 1);
  // No action at the next step.
  CHECK(ctrl.decide(v2(2.2, 2.5), 1).kind == Decision::Kind::failed);
}

TEST_CASE("noise-free trajectory follows the policy chain") {
  Corridor c(4);
  const Controller ctrl(c.res.policy, c.cover, c.grid, c.sys, c.labels);
  NoiseSource noise(kZeroNoise, 1);
  const auto rec = simulate_trajectory(ctrl, c.grid.reference(0), noise);
  CHECK(rec.satisfied);
  CHECK(rec.outcome == Outcome::reached_goal);
  // Oracle: follow argmax actions on reference points.
  std::size_t cell = 0;
  for (std::size_t k = 0; k + 1 < rec.states.size(); ++k) {
    CHECK(rec.states[k].isApprox(c.grid.reference(cell)));
    cell = static_cast<std::size_t>(c.res.policy.action[k][PartitionGrid::state_of_cell(cell)]);
  }
  CHECK(cell == 4);
  CHECK(rec.states.back().isApprox(c.grid.reference(4)));
}

TEST_CASE("trivial starts") {
  Corridor c(4);
  const Controller ctrl(c.res.policy, c.cover, c.grid, c.sys, make_labels(c.grid, {4}, {0}));
  NoiseSource noise(kZeroNoise, 1);
  const auto goal = simulate_trajectory(ctrl, c.grid.reference(4), noise);
  CHECK(goal.satisfied);
  CHECK(goal.inputs.empty());
  const auto bad = simulate_trajectory(ctrl, c.grid.reference(0), noise);
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.outcome == Outcome::hit_unsafe);
  CHECK(monte_carlo_validate(ctrl, c.grid.reference(0), 10, noise).p_hat == 0.0);
}

TEST_CASE("deterministic success gives p_hat one") {
  Corridor c(4);
  const Controller ctrl(c.res.policy, c.cover, c.grid, c.sys, c.labels);
  const auto v = monte_carlo_validate(ctrl, c.grid.reference(1), 25, NoiseSource(kZeroNoise, 3));
  CHECK(v.p_hat == 1.0);
  CHECK(v.ci_halfwidth == 0.0);
  CHECK(v.runs == 25);
}

TEST_CASE("too short a horizon times out") {
  Corridor c(1);
  const Controller ctrl(c.res.policy, c.cover, c.grid, c.sys, c.labels);
  NoiseSource noise(kZeroNoise, 1);
  const auto rec = simulate_trajectory(ctrl, c.grid.reference(0), noise);
  CHECK_FALSE(rec.satisfied);
}

TEST_CASE("same seed, same trajectories") {
  Corridor c(4);
  const Controller ctrl(c.res.policy, c.cover, c.grid, c.sys, c.labels);
  const GaussianNoise g{v2(0, 0), Eigen::Matrix2d::Identity() * 0.01};
  NoiseSource a(g, 17), b(g, 17);
  const auto ra = simulate_trajectory(ctrl, c.grid.reference(0), a);
  const auto rb = simulate_trajectory(ctrl, c.grid.reference(0), b);
  REQUIRE(ra.states.size() == rb.states.size());
  for (std::size_t k = 0; k < ra.states.size(); ++k) CHECK(ra.states[k] == rb.states[k]);
}
