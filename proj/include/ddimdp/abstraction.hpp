#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddimdp/dynamics.hpp"
#include "ddimdp/partition.hpp"
#include "ddimdp/scenario.hpp"

namespace ddimdp {

// ---------------------------------------------------------------------------
// Target sets

enum class CoverScheme { singletons, axis_pairs, custom };

const char* to_string(CoverScheme scheme);
CoverScheme cover_scheme_from_string(const std::string& name);

// Action r aims at targets[r], an increasing list of cell indices.
struct TargetCover {
  std::vector<std::vector<std::size_t>> targets;
  CoverScheme scheme = CoverScheme::singletons;

  std::size_t size() const { return targets.size(); }
};

// singletons: one target per cell. axis_pairs: every singleton followed by
// every pair of face-adjacent cells along each axis. custom: the given lists,
// which must cover every cell.
TargetCover build_target_cover(const PartitionGrid& grid, CoverScheme scheme,
                               const std::optional<std::vector<std::vector<std::size_t>>>& custom = std::nullopt);

// ---------------------------------------------------------------------------
// Goal and unsafe regions

enum class AlignRule {
  exact,   // box faces must lie on grid lines
  inner,   // cells fully inside the box
  center,  // cells whose reference point is inside the box
  outer,   // cells meeting the box interior
};

AlignRule align_rule_from_string(const std::string& name);
const char* to_string(AlignRule rule);

struct RegionSpec {
  std::vector<std::size_t> cells;
  std::vector<Box> boxes;
  AlignRule align = AlignRule::exact;
};

// Sorted, deduplicated cell list. Throws misaligned_region for an exact box
// whose faces do not lie on grid lines.
std::vector<std::size_t> resolve_region(const PartitionGrid& grid, const RegionSpec& spec);

enum class StateKind : std::uint8_t { absorbing, goal, unsafe, regular };

struct StateLabels {
  std::vector<StateKind> kinds;  // indexed by abstract state; kinds[0] is absorbing

  bool terminal(std::size_t s) const { return kinds[s] != StateKind::regular; }
};

// Goal takes precedence over unsafe for cells listed in both.
StateLabels make_labels(const PartitionGrid& grid, const std::vector<std::size_t>& goal_cells,
                        const std::vector<std::size_t>& unsafe_cells);

// ---------------------------------------------------------------------------
// Enabled actions and branches

struct EnabledAction {
  std::size_t action = 0;
  // Active references in target order, as cell indices, and their 1-based
  // positions in the target list.
  std::vector<std::size_t> branch_cells;
  std::vector<int> branch_positions;
};

struct ActionTable {
  std::vector<std::vector<EnabledAction>> per_cell;  // sorted by action id

  std::size_t num_enabled() const;
  std::size_t max_branches() const;
  // Distinct action ids enabled somewhere.
  std::size_t num_distinct_actions() const;
};

// Action r is enabled at cell i iff the cell is covered by the union of the
// Pre sets of its target references; branch l is active iff the part of the
// cell steered to reference l by the lowest-index rule has interior.
// Cells in skip (if given, indexed by cell) are left without actions.
ActionTable compute_action_table(const PartitionGrid& grid, const TargetCover& cover, const AffineSystem& sys,
                                 const std::vector<bool>* skip = nullptr);

// ---------------------------------------------------------------------------
// Models

inline constexpr std::size_t kSelfLoopAction = static_cast<std::size_t>(-1);

// Destinations are abstract state ids in increasing order. The residual
// collects out-of-domain mass and every cell no sample reached; it is valued
// as unsafe and exported as a transition to the absorbing state.
struct IntervalRow {
  std::vector<std::uint32_t> dest;
  std::vector<ProbInterval> prob;
  ProbInterval residual{0.0, 0.0};

  std::size_t num_transitions() const { return dest.size() + (residual.high > 0.0 ? 1 : 0); }
};

struct RmdpAction {
  std::size_t action = 0;
  std::vector<std::size_t> branch_cells;
  std::vector<int> branch_positions;
  std::vector<IntervalRow> branches;
};

struct ImdpAction {
  std::size_t action = 0;
  std::vector<std::size_t> branch_cells;
  std::vector<int> branch_positions;
  IntervalRow row;
};

struct ModelMeta {
  std::uint64_t samples = 0;   // Z
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t num_cells = 0;   // N
  std::size_t cover_size = 0;  // |cover|
  std::size_t num_actions = 0; // M: actions enabled at some non-terminal state
  std::size_t max_branches = 0;
  double alpha = 0.0;          // beta * N * M * L_max
  std::string scheme;
};

template <class Action>
struct Model {
  StateLabels labels;
  std::vector<std::vector<Action>> actions;  // indexed by abstract state
  TargetCover cover;
  ModelMeta meta;

  std::size_t num_states() const { return actions.size(); }
  // Transitions of non-terminal states (self-loops excluded).
  std::size_t num_transitions() const;
  std::size_t num_enabled_pairs() const;
};

using RMDPModel = Model<RmdpAction>;
using IMDPModel = Model<ImdpAction>;

double compute_alpha(double beta, std::size_t N, std::size_t M, std::size_t L_max);

// Per branch: one interval per destination cell hit by at least one shifted
// sample, plus the residual. Terminal states get a single [1,1] self-loop.
RMDPModel build_rmdp(const ActionTable& table, const PartitionGrid& grid, const TargetCover& cover,
                     const SampleBatch& samples, double beta, const StateLabels& labels, std::uint64_t seed = 0);

// Interval hull over branches: low = min (0 if a branch misses the
// destination), high = max.
IMDPModel embed_imdp(const RMDPModel& rmdp);

IntervalRow merge_rows(const std::vector<IntervalRow>& rows);

}  // namespace ddimdp
