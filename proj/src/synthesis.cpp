#include "ddimdp/synthesis.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ddimdp/error.hpp"
#include "ddimdp/parallel.hpp"

namespace ddimdp {
namespace {

constexpr double kRowTol = 1e-9;

struct Slot {
  double value;
  std::uint32_t id;
  ProbInterval p;
};

double assign_mass(std::vector<Slot>& slots, Bound bound) {
  double mass = 0.0;
  double result = 0.0;
  double high_sum = 0.0;
  for (const auto& s : slots) {
    mass += s.p.low;
    high_sum += s.p.high;
  }
  if (mass > 1.0 + kRowTol || high_sum < 1.0 - kRowTol) {
    throw Error(ErrorKind::interval_row_infeasible,
                "sum of lows " + std::to_string(mass) + ", sum of highs " + std::to_string(high_sum));
  }
  if (bound == Bound::lower) {
    std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
      return a.value < b.value || (a.value == b.value && a.id < b.id);
    });
  } else {
    std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
      return a.value > b.value || (a.value == b.value && a.id < b.id);
    });
  }
  double slack = 1.0 - mass;
  for (const auto& s : slots) {
    double p = s.p.low;
    if (slack > 0.0) {
      const double extra = std::min(slack, s.p.high - s.p.low);
      p += extra;
      slack -= extra;
    }
    result += p * s.value;
  }
  return result;
}

template <class Action, class Backup>
SynthesisResult iterate(const Model<Action>& model, int K, Backup&& backup) {
  if (K < 1) throw Error(ErrorKind::invalid_config, "horizon must be at least 1");
  const std::size_t S = model.num_states();
  SynthesisResult out;
  out.values.V.assign(static_cast<std::size_t>(K) + 1, std::vector<double>(S, 0.0));
  out.policy.action.assign(static_cast<std::size_t>(K), std::vector<std::int64_t>(S, kNoAction));
  for (std::size_t s = 0; s < S; ++s) {
    if (model.labels.kinds[s] == StateKind::goal) out.values.V[0][s] = 1.0;
  }
  for (int k = 0; k < K; ++k) {
    const auto& prev = out.values.V[static_cast<std::size_t>(k)];
    auto& next = out.values.V[static_cast<std::size_t>(k) + 1];
    // Acting at time K-k-1 leaves k steps afterwards.
    auto& chosen = out.policy.action[static_cast<std::size_t>(K - k - 1)];
    parallel_for(S, [&](std::size_t s) {
      const StateKind kind = model.labels.kinds[s];
      if (kind == StateKind::goal) {
        next[s] = 1.0;
        return;
      }
      if (kind != StateKind::regular) return;
      double best = 0.0;
      std::int64_t arg = kNoAction;
      for (const auto& a : model.actions[s]) {
        const double v = backup(a, prev);
        if (arg == kNoAction || v > best) {
          best = v;
          arg = static_cast<std::int64_t>(a.action);
        }
      }
      next[s] = std::clamp(best, 0.0, 1.0);
      chosen[s] = arg;
    });
  }
  return out;
}

}  // namespace

double extremal_expectation(std::span<const double> values, std::span<const ProbInterval> intervals, Bound bound) {
  if (values.size() != intervals.size()) throw Error(ErrorKind::dimension_mismatch, "values/intervals length");
  std::vector<Slot> slots(values.size());
  for (std::size_t d = 0; d < values.size(); ++d) slots[d] = {values[d], static_cast<std::uint32_t>(d), intervals[d]};
  return assign_mass(slots, bound);
}

double worst_case_expectation(const IntervalRow& row, std::span<const double> state_values, Bound bound) {
  std::vector<Slot> slots;
  slots.reserve(row.dest.size() + 1);
  // The residual stands for the absorbing state 0.
  slots.push_back({0.0, 0, row.residual});
  for (std::size_t d = 0; d < row.dest.size(); ++d) {
    slots.push_back({state_values[row.dest[d]], row.dest[d], row.prob[d]});
  }
  return assign_mass(slots, bound);
}

SynthesisResult robust_value_iteration(const IMDPModel& model, int K, const SynthesisOptions& opts) {
  return iterate(model, K, [&](const ImdpAction& a, const std::vector<double>& V) {
    return worst_case_expectation(a.row, V, opts.bound);
  });
}

SynthesisResult rmdp_refined_value_iteration(const RMDPModel& model, int K, const SynthesisOptions& opts) {
  return iterate(model, K, [&](const RmdpAction& a, const std::vector<double>& V) {
    double v = 0.0;
    for (std::size_t l = 0; l < a.branches.size(); ++l) {
      const double b = worst_case_expectation(a.branches[l], V, opts.bound);
      if (l == 0) {
        v = b;
      } else {
        v = opts.bound == Bound::lower ? std::min(v, b) : std::max(v, b);
      }
    }
    return v;
  });
}

}  // namespace ddimdp
