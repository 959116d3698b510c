#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ddimdp/abstraction.hpp"

namespace ddimdp {

inline constexpr std::int64_t kNoAction = -1;

// V[k][s]: lower bound on reaching the goal within k steps from state s.
struct ValueTable {
  std::vector<std::vector<double>> V;

  int horizon() const { return static_cast<int>(V.size()) - 1; }
  const std::vector<double>& final() const { return V.back(); }
};

// action[k][s] is the action id to apply at time k (k = 0..K-1), or kNoAction
// for terminal states and states without enabled actions.
struct Policy {
  std::vector<std::vector<std::int64_t>> action;

  int horizon() const { return static_cast<int>(action.size()); }
};

struct SynthesisResult {
  ValueTable values;
  Policy policy;
};

enum class Bound { lower, upper };

// Extremal expectation of values over {p : low <= p <= high, sum p = 1}.
// Bound::lower fills slack in ascending value order, Bound::upper in
// descending order; ties are broken by position. Throws
// interval_row_infeasible when the box misses the simplex.
double extremal_expectation(std::span<const double> values, std::span<const ProbInterval> intervals,
                            Bound bound = Bound::lower);

// Row form: destination d has value state_values[row.dest[d]], the residual
// has value 0.
double worst_case_expectation(const IntervalRow& row, std::span<const double> state_values,
                              Bound bound = Bound::lower);

struct SynthesisOptions {
  Bound bound = Bound::lower;
};

SynthesisResult robust_value_iteration(const IMDPModel& model, int K, const SynthesisOptions& opts = {});

// Inner minimum taken per branch, then over branches.
SynthesisResult rmdp_refined_value_iteration(const RMDPModel& model, int K, const SynthesisOptions& opts = {});

}  // namespace ddimdp
