#include <set>

#include "doctest.h"

#include "ddimdp/abstraction.hpp"
#include "ddimdp/error.hpp"
#include "ddimdp/io.hpp"
#include "support.hpp"

using namespace ddimdp;
using testing::box2;
using testing::v2;

namespace {

AffineSystem example1() {
  return AffineSystem(Eigen::Matrix2d::Identity(), -Eigen::Matrix2d::Identity(), HPolytope(box2(0, 0.5, 1, 1.5)),
                      box2(-25, -25, 25, 25));
}

AffineSystem double_integrator() {
  Eigen::Matrix2d A, B;
  A << 1, 1, 0, 1;
  B << 0.5, 0, 0, 1;
  return AffineSystem(A, B, HPolytope(box2(-2, -3, 4, 3)), box2(-11, -11, 11, 11));
}

SampleBatch gaussian_samples(std::size_t Z, double var, std::uint64_t seed) {
  NoiseSource src(GaussianNoise{v2(0, 0), Eigen::Matrix2d::Identity() * var}, seed);
  return src.draw_batch(Z);
}

void check_row_feasible(const IntervalRow& row) {
  double lo = row.residual.low, hi = row.residual.high;
  CHECK(row.residual.low >= 0.0);
  CHECK(row.residual.low <= row.residual.high);
  for (const auto& p : row.prob) {
    CHECK(0.0 <= p.low);
    CHECK(p.low <= p.high);
    CHECK(p.high <= 1.0);
    lo += p.low;
    hi += p.high;
  }
  CHECK(lo <= 1.0 + 1e-12);
  CHECK(hi >= 1.0 - 1e-12);
}

}  // namespace

TEST_CASE("cover sizes") {
  const PartitionGrid g(box2(0, 0, 5, 5), {5, 5});
  CHECK(build_target_cover(g, CoverScheme::singletons).size() == 25);
  for (int n : {1, 2, 5, 8}) {
    const PartitionGrid h(box2(0, 0, 1, 1), {n, n});
    CHECK(build_target_cover(h, CoverScheme::axis_pairs).size() == static_cast<std::size_t>(n * n + 2 * n * (n - 1)));
  }
  const PartitionGrid line(Box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)), {3});
  const auto custom = build_target_cover(line, CoverScheme::custom, std::vector<std::vector<std::size_t>>{{0, 1, 2}});
  CHECK(custom.size() == 1);
  CHECK_THROWS_AS(build_target_cover(line, CoverScheme::custom, std::vector<std::vector<std::size_t>>{{0, 1}}), Error);
  CHECK_THROWS_AS(build_target_cover(line, CoverScheme::custom, std::vector<std::vector<std::size_t>>{{0, 3}}), Error);
}

TEST_CASE("pairs are face-adjacent and singletons come first") {
  const PartitionGrid g(box2(0, 0, 3, 3), {3, 3});
  const auto cover = build_target_cover(g, CoverScheme::axis_pairs);
  for (std::size_t r = 0; r < 9; ++r) CHECK(cover.targets[r] == std::vector<std::size_t>{r});
  for (std::size_t r = 9; r < cover.size(); ++r) {
    const auto& t = cover.targets[r];
    REQUIRE(t.size() == 2);
    const auto a = g.multi_index(t[0]), b = g.multi_index(t[1]);
    CHECK(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) == 1);
  }
}

TEST_CASE("region resolution") {
  const PartitionGrid g(box2(-11, -11, 11, 11), {11, 11});
  RegionSpec exact;
  exact.boxes.push_back(box2(-1, -1, 1, 1));
  CHECK(resolve_region(g, exact) == std::vector<std::size_t>{60});
  RegionSpec misaligned;
  misaligned.boxes.push_back(box2(-2, -2, 2, 2));
  CHECK_THROWS_AS(resolve_region(g, misaligned), Error);
  misaligned.align = AlignRule::inner;
  CHECK(resolve_region(g, misaligned) == std::vector<std::size_t>{60});
  misaligned.align = AlignRule::outer;
  CHECK(resolve_region(g, misaligned).size() == 9);
  misaligned.align = AlignRule::center;
  CHECK(resolve_region(g, misaligned).size() == 9);  // closed box keeps centres at +-2
  RegionSpec cells;
  cells.cells = {3, 1, 3};
  CHECK(resolve_region(g, cells) == std::vector<std::size_t>{1, 3});

  const auto e1 = build_partition(box2(-25, -25, 25, 25), {50, 50});
  RegionSpec bottom;
  bottom.boxes.push_back(box2(-25, -25, 25, -24));
  const auto goal = resolve_region(e1, bottom);
  CHECK(goal.size() == 50);
  for (std::size_t c : goal) CHECK(e1.multi_index(c)[1] == 0);
}

TEST_CASE("labels") {
  const PartitionGrid g(box2(0, 0, 2, 2), {2, 2});
  const auto L = make_labels(g, {0}, {0, 3});
  CHECK(L.kinds[0] == StateKind::absorbing);
  CHECK(L.kinds[1] == StateKind::goal);
  CHECK(L.kinds[4] == StateKind::unsafe);
  CHECK_FALSE(L.terminal(2));
}

TEST_CASE("example 1: singletons enable nothing, pairs enable one two-branch action per interior cell") {
  const auto grid = build_partition(box2(-25, -25, 25, 25), {50, 50});
  const auto sys = example1();
  const auto stp = compute_action_table(grid, build_target_cover(grid, CoverScheme::singletons), sys);
  CHECK(stp.num_enabled() == 0);

  const auto cover = build_target_cover(grid, CoverScheme::axis_pairs);
  const auto mtp = compute_action_table(grid, cover, sys);
  CHECK(mtp.num_enabled() == 49 * 49);
  CHECK(mtp.max_branches() == 2);
  for (std::size_t i = 0; i < grid.num_cells(); ++i) {
    for (const auto& e : mtp.per_cell[i]) {
      CHECK(e.branch_cells.size() == 2);
      CHECK(e.branch_positions == std::vector<int>{1, 2});
      const auto& t = cover.targets[e.action];
      // Horizontal pair one row below the cell, shifted half a cell left.
      const auto mi = grid.multi_index(i), a = grid.multi_index(t[0]), b = grid.multi_index(t[1]);
      CHECK(a[1] == mi[1] - 1);
      CHECK(b[1] == mi[1] - 1);
      CHECK(a[0] == mi[0] - 1);
      CHECK(b[0] == mi[0]);
    }
  }
}

TEST_CASE("a cell inside the first Pre set has a single branch") {
  // Pre(c) = c - U is the 2x2 box around c.
  const AffineSystem sys(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(), HPolytope(box2(-1, -1, 1, 1)),
                         box2(0, 0, 3, 3));
  const PartitionGrid grid(box2(0, 0, 3, 3), {3, 3});
  const TargetCover cover = build_target_cover(grid, CoverScheme::custom,
                                               std::vector<std::vector<std::size_t>>{{4, 5}, {0, 1, 2, 3, 6, 7, 8}});
  const auto table = compute_action_table(grid, cover, sys);
  bool found = false;
  for (const auto& e : table.per_cell[4]) {
    if (e.action != 0) continue;
    found = true;
    CHECK(e.branch_cells == std::vector<std::size_t>{4});
  }
  CHECK(found);
}

TEST_CASE("skipped cells get no actions") {
  const auto grid = build_partition(box2(-11, -11, 11, 11), {18, 18});
  const auto sys = double_integrator();
  const auto cover = build_target_cover(grid, CoverScheme::singletons);
  std::vector<bool> skip(grid.num_cells(), true);
  CHECK(compute_action_table(grid, cover, sys, &skip).num_enabled() == 0);
}

TEST_CASE("zero noise gives a single-destination row") {
  const PartitionGrid grid(box2(0, 0, 3, 3), {3, 3});
  const AffineSystem sys(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(), HPolytope(box2(-1, -1, 1, 1)),
                         grid.domain());
  const auto cover = build_target_cover(grid, CoverScheme::singletons);
  const auto table = compute_action_table(grid, cover, sys);
  SampleBatch zero{Eigen::MatrixXd::Zero(100, 2)};
  const auto labels = make_labels(grid, {8}, {});
  const auto model = build_rmdp(table, grid, cover, zero, 1e-3, labels);
  const auto& acts = model.actions[PartitionGrid::state_of_cell(4)];
  REQUIRE_FALSE(acts.empty());
  for (const auto& a : acts) {
    REQUIRE(a.branches.size() == 1);
    const auto& row = a.branches[0];
    REQUIRE(row.dest.size() == 1);
    CHECK(row.dest[0] == PartitionGrid::state_of_cell(a.action));
    CHECK(row.prob[0] == ProbInterval{pac_interval(100, 0, 1e-3).low, 1.0});
    CHECK(row.residual == ProbInterval{0.0, pac_interval(100, 100, 1e-3).high});
  }
  // Terminal states carry only the self-loop.
  for (std::size_t s : {std::size_t{0}, PartitionGrid::state_of_cell(8)}) {
    REQUIRE(model.actions[s].size() == 1);
    CHECK(model.actions[s][0].action == kSelfLoopAction);
    CHECK(model.actions[s][0].branches[0].dest == std::vector<std::uint32_t>{static_cast<std::uint32_t>(s)});
    CHECK(model.actions[s][0].branches[0].prob[0] == ProbInterval{1.0, 1.0});
  }
  CHECK_THROWS_AS(build_rmdp(table, grid, cover, SampleBatch{Eigen::MatrixXd(0, 2)}, 1e-3, labels), Error);
}

TEST_CASE("built rows are feasible and sane") {
  const auto grid = build_partition(box2(-11, -11, 11, 11), {15, 15});
  const auto sys = double_integrator();
  const auto cover = build_target_cover(grid, CoverScheme::axis_pairs);
  const auto table = compute_action_table(grid, cover, sys);
  const auto model = build_rmdp(table, grid, cover, gaussian_samples(2000, 0.15, 1), 1e-8, make_labels(grid, {112}, {}));
  CHECK(model.num_enabled_pairs() > 0);
  std::size_t L_max = 0;
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    for (const auto& a : model.actions[s]) {
      if (a.action != kSelfLoopAction) {
        CHECK(a.branches.size() <= cover.targets[a.action].size());
        CHECK_FALSE(a.branches.empty());
        L_max = std::max(L_max, a.branches.size());
      }
      for (const auto& row : a.branches) check_row_feasible(row);
    }
  }
  CHECK(model.meta.max_branches == L_max);
  CHECK(model.meta.alpha == doctest::Approx(1e-8 * 225 * model.meta.num_actions * L_max));
  const auto imdp = embed_imdp(model);
  for (const auto& acts : imdp.actions)
    for (const auto& a : acts) check_row_feasible(a.row);
}

TEST_CASE("merge rows takes the interval hull") {
  IntervalRow a, b;
  a.dest = {3};
  a.prob = {{0.1, 0.2}};
  a.residual = {0.8, 0.9};
  b.dest = {3};
  b.prob = {{0.3, 0.4}};
  b.residual = {0.6, 0.7};
  const auto m = merge_rows({a, b});
  CHECK(m.prob[0] == ProbInterval{0.1, 0.4});
  CHECK(m.residual == ProbInterval{0.6, 0.9});

  IntervalRow c;
  c.dest = {2, 5};
  c.prob = {{0.5, 0.7}, {0.3, 0.5}};
  IntervalRow d;
  d.dest = {5};
  d.prob = {{1.0, 1.0}};
  const auto md = merge_rows({c, d});
  CHECK(md.dest == std::vector<std::uint32_t>{2, 5});
  CHECK(md.prob[0] == ProbInterval{0.0, 0.7});
  CHECK(md.prob[1] == ProbInterval{0.3, 1.0});

  const auto single = merge_rows({c});
  CHECK(single.dest == c.dest);
  CHECK(single.prob == c.prob);
}

TEST_CASE("MTP model extends the STP model") {
  const auto grid = build_partition(box2(-11, -11, 11, 11), {18, 18});
  const auto sys = double_integrator();
  const auto samples = gaussian_samples(1000, 0.15, 3);
  const auto labels = make_labels(grid, {}, {});
  const auto stp_cover = build_target_cover(grid, CoverScheme::singletons);
  const auto mtp_cover = build_target_cover(grid, CoverScheme::axis_pairs);
  const auto stp = build_rmdp(compute_action_table(grid, stp_cover, sys), grid, stp_cover, samples, 1e-6, labels);
  const auto mtp = build_rmdp(compute_action_table(grid, mtp_cover, sys), grid, mtp_cover, samples, 1e-6, labels);
  CHECK(stp.num_enabled_pairs() > 0);
  CHECK(mtp.num_enabled_pairs() > stp.num_enabled_pairs());
  for (std::size_t s = 1; s < stp.num_states(); ++s) {
    for (const auto& a : stp.actions[s]) {
      bool found = false;
      for (const auto& b : mtp.actions[s]) {
        if (b.action != a.action) continue;
        found = true;
        REQUIRE(b.branches.size() == 1);
        CHECK(b.branches[0].dest == a.branches[0].dest);
        CHECK(b.branches[0].prob == a.branches[0].prob);
        CHECK(b.branches[0].residual == a.branches[0].residual);
      }
      CHECK(found);
    }
  }
}

TEST_CASE("identical inputs give byte-identical models") {
  const auto grid = build_partition(box2(-11, -11, 11, 11), {11, 11});
  const auto sys = double_integrator();
  const auto cover = build_target_cover(grid, CoverScheme::axis_pairs);
  auto build = [&] {
    const auto table = compute_action_table(grid, cover, sys);
    return to_json(ModelBundle{grid, sys, build_rmdp(table, grid, cover, gaussian_samples(500, 0.15, 9), 1e-8,
                                                     make_labels(grid, {60}, {}), 9)})
        .dump();
  };
  CHECK(build() == build());
}
