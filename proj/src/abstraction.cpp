#include "ddimdp/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ddimdp/error.hpp"
#include "ddimdp/lp.hpp"
#include "ddimdp/parallel.hpp"

namespace ddimdp {
namespace {

constexpr double kAlignTol = 1e-9;

std::size_t transitions_of(const ImdpAction& a) { return a.row.num_transitions(); }

std::size_t transitions_of(const RmdpAction& a) {
  std::set<std::uint32_t> dest;
  bool residual = false;
  for (const auto& row : a.branches) {
    dest.insert(row.dest.begin(), row.dest.end());
    residual = residual || row.residual.high > 0.0;
  }
  return dest.size() + (residual ? 1 : 0);
}

// Axis-aligned bounding box of a bounded polytope via 2n LPs.
Box bounding_box(const HPolytope& poly) {
  const int n = poly.dim();
  Eigen::VectorXd lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    dir(a) = 1.0;
    const auto up = lp::maximize(poly.normals(), poly.offsets(), dir);
    const auto down = lp::maximize(poly.normals(), poly.offsets(), -dir);
    if (up.status != lp::Status::optimal || down.status != lp::Status::optimal) {
      throw Error(ErrorKind::unbounded_polytope, "backward reachable set is empty or unbounded");
    }
    hi(a) = up.value;
    lo(a) = -down.value;
  }
  return Box(lo, hi);
}

bool corners_inside(const std::vector<Eigen::VectorXd>& corners, const HPolytope& poly) {
  return std::all_of(corners.begin(), corners.end(), [&](const Eigen::VectorXd& v) { return poly.contains(v); });
}

// Index range [first, last] of cells lying inside [lo, hi] on one axis.
std::pair<int, int> cells_within(const PartitionGrid& grid, int axis, double lo, double hi) {
  const double low = grid.domain().low(axis);
  const double w = grid.width()(axis);
  const int d = grid.dims()[static_cast<std::size_t>(axis)];
  const double slack = kAlignTol * std::max(1.0, w);
  int first = static_cast<int>(std::ceil((lo - slack - low) / w));
  int last = static_cast<int>(std::floor((hi + slack - low) / w)) - 1;
  first = std::max(first, 0);
  last = std::min(last, d - 1);
  return {first, last};
}

}  // namespace

const char* to_string(CoverScheme scheme) {
  switch (scheme) {
    case CoverScheme::singletons:
      return "singletons";
    case CoverScheme::axis_pairs:
      return "axis-pairs";
    case CoverScheme::custom:
      return "custom";
  }
  return "unknown";
}

CoverScheme cover_scheme_from_string(const std::string& name) {
  if (name == "singletons" || name == "stp") return CoverScheme::singletons;
  if (name == "axis-pairs" || name == "axis_pairs" || name == "mtp") return CoverScheme::axis_pairs;
  if (name == "custom") return CoverScheme::custom;
  throw Error(ErrorKind::invalid_config, "unknown cover scheme '" + name + "'");
}

TargetCover build_target_cover(const PartitionGrid& grid, CoverScheme scheme,
                               const std::optional<std::vector<std::vector<std::size_t>>>& custom) {
  TargetCover cover;
  cover.scheme = scheme;
  const std::size_t N = grid.num_cells();
  if (scheme == CoverScheme::custom) {
    if (!custom) throw Error(ErrorKind::invalid_config, "custom cover needs target lists");
    std::vector<bool> seen(N, false);
    for (auto target : *custom) {
      if (target.empty()) throw Error(ErrorKind::invalid_config, "custom target is empty");
      std::sort(target.begin(), target.end());
      if (std::adjacent_find(target.begin(), target.end()) != target.end()) {
        throw Error(ErrorKind::invalid_config, "custom target repeats a cell");
      }
      for (std::size_t c : target) {
        if (c >= N) throw Error(ErrorKind::invalid_config, "custom target cell " + std::to_string(c) + " out of range");
        seen[c] = true;
      }
      cover.targets.push_back(std::move(target));
    }
    const auto missing = std::find(seen.begin(), seen.end(), false);
    if (missing != seen.end()) {
      throw Error(ErrorKind::not_a_cover,
                  "cell " + std::to_string(missing - seen.begin()) + " belongs to no target");
    }
    return cover;
  }

  for (std::size_t i = 0; i < N; ++i) cover.targets.push_back({i});
  if (scheme == CoverScheme::axis_pairs) {
    for (int axis = 0; axis < grid.dim(); ++axis) {
      for (std::size_t i = 0; i < N; ++i) {
        auto idx = grid.multi_index(i);
        if (idx[static_cast<std::size_t>(axis)] + 1 >= grid.dims()[static_cast<std::size_t>(axis)]) continue;
        ++idx[static_cast<std::size_t>(axis)];
        cover.targets.push_back({i, grid.flat_index(idx)});
      }
    }
  }
  return cover;
}

AlignRule align_rule_from_string(const std::string& name) {
  if (name == "exact") return AlignRule::exact;
  if (name == "inner") return AlignRule::inner;
  if (name == "center") return AlignRule::center;
  if (name == "outer") return AlignRule::outer;
  throw Error(ErrorKind::invalid_config, "unknown alignment rule '" + name + "'");
}

const char* to_string(AlignRule rule) {
  switch (rule) {
    case AlignRule::exact:
      return "exact";
    case AlignRule::inner:
      return "inner";
    case AlignRule::center:
      return "center";
    case AlignRule::outer:
      return "outer";
  }
  return "unknown";
}

std::vector<std::size_t> resolve_region(const PartitionGrid& grid, const RegionSpec& spec) {
  std::vector<std::size_t> out;
  for (std::size_t c : spec.cells) {
    if (c >= grid.num_cells()) throw Error(ErrorKind::invalid_config, "region cell " + std::to_string(c) + " out of range");
    out.push_back(c);
  }
  for (const Box& box : spec.boxes) {
    if (box.dim() != grid.dim()) throw Error(ErrorKind::dimension_mismatch, "region box dimension");
    if (spec.align == AlignRule::exact) {
      for (int a = 0; a < grid.dim(); ++a) {
        for (double face : {box.low(a), box.high(a)}) {
          const double t = (face - grid.domain().low(a)) / grid.width()(a);
          if (std::abs(t - std::round(t)) > kAlignTol * std::max(1.0, std::abs(t))) {
            throw Error(ErrorKind::misaligned_region, "face " + std::to_string(face) + " on axis " +
                                                          std::to_string(a) + " is not a grid line");
          }
        }
      }
    }
    for (std::size_t i = 0; i < grid.num_cells(); ++i) {
      const Box cell = grid.cell(i);
      bool take = true;
      for (int a = 0; a < grid.dim() && take; ++a) {
        const double tol = kAlignTol * std::max(1.0, grid.width()(a));
        switch (spec.align) {
          case AlignRule::exact:
          case AlignRule::inner:
            take = cell.low(a) >= box.low(a) - tol && cell.high(a) <= box.high(a) + tol;
            break;
          case AlignRule::center: {
            const double c = 0.5 * (cell.low(a) + cell.high(a));
            take = c >= box.low(a) && c <= box.high(a);
            break;
          }
          case AlignRule::outer:
            take = cell.high(a) > box.low(a) + tol && cell.low(a) < box.high(a) - tol;
            break;
        }
      }
      if (take) out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StateLabels make_labels(const PartitionGrid& grid, const std::vector<std::size_t>& goal_cells,
                        const std::vector<std::size_t>& unsafe_cells) {
  StateLabels labels;
  labels.kinds.assign(grid.num_states(), StateKind::regular);
  labels.kinds[PartitionGrid::kAbsorbingState] = StateKind::absorbing;
  for (std::size_t c : unsafe_cells) labels.kinds.at(PartitionGrid::state_of_cell(c)) = StateKind::unsafe;
  for (std::size_t c : goal_cells) labels.kinds.at(PartitionGrid::state_of_cell(c)) = StateKind::goal;
  return labels;
}

std::size_t ActionTable::num_enabled() const {
  std::size_t total = 0;
  for (const auto& cell : per_cell) total += cell.size();
  return total;
}

std::size_t ActionTable::max_branches() const {
  std::size_t best = 0;
  for (const auto& cell : per_cell) {
    for (const auto& e : cell) best = std::max(best, e.branch_cells.size());
  }
  return best;
}

std::size_t ActionTable::num_distinct_actions() const {
  std::set<std::size_t> ids;
  for (const auto& cell : per_cell) {
    for (const auto& e : cell) ids.insert(e.action);
  }
  return ids.size();
}

ActionTable compute_action_table(const PartitionGrid& grid, const TargetCover& cover, const AffineSystem& sys,
                                 const std::vector<bool>* skip) {
  const int n = grid.dim();
  // Pre(c) is a translate of Pre(0) by A^-1 c, so one bounding box serves all.
  const Box base_box = bounding_box(pre_point(sys, Eigen::VectorXd::Zero(n)));
  const Eigen::MatrixXd A_inv = sys.A().inverse();

  std::vector<Box> cells(grid.num_cells());
  std::vector<HPolytope> cell_polys(grid.num_cells());
  std::vector<Eigen::VectorXd> refs(grid.num_cells());
  for (std::size_t i = 0; i < grid.num_cells(); ++i) {
    cells[i] = grid.cell(i);
    cell_polys[i] = HPolytope(cells[i]);
    refs[i] = grid.reference(i);
  }

  // found[r] lists (cell, enabled action) pairs for target r.
  std::vector<std::vector<std::pair<std::size_t, EnabledAction>>> found(cover.size());
  parallel_for(cover.size(), [&](std::size_t r) {
    const auto& target = cover.targets[r];
    std::vector<Eigen::VectorXd> target_refs;
    for (std::size_t c : target) target_refs.push_back(refs[c]);
    const auto pres = pre_union(sys, target_refs);

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    for (const auto& c : target_refs) {
      const Eigen::VectorXd shift = A_inv * c;
      lo = lo.cwiseMin(base_box.low + shift);
      hi = hi.cwiseMax(base_box.high + shift);
    }
    std::vector<int> first(static_cast<std::size_t>(n)), last(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      std::tie(first[static_cast<std::size_t>(a)], last[static_cast<std::size_t>(a)]) = cells_within(grid, a, lo(a), hi(a));
      if (first[static_cast<std::size_t>(a)] > last[static_cast<std::size_t>(a)]) return;
    }

    std::vector<int> idx = first;
    while (true) {
      const std::size_t i = grid.flat_index(idx);
      if (!(skip && (*skip)[i])) {
        const auto corners = cells[i].corners();
        if (box_covered_by_union(cells[i], pres)) {
          EnabledAction e;
          e.action = r;
          for (std::size_t l = 0; l < pres.size(); ++l) {
            bool shadowed = false;
            for (std::size_t j = 0; j < l && !shadowed; ++j) shadowed = corners_inside(corners, pres[j]);
            if (shadowed) continue;
            const HPolytope region = intersect(cell_polys[i], pres[l]);
            const std::span<const HPolytope> earlier(pres.data(), l);
            if (!region_difference(region, earlier).empty()) {
              e.branch_cells.push_back(target[l]);
              e.branch_positions.push_back(static_cast<int>(l) + 1);
            }
          }
          found[r].emplace_back(i, std::move(e));
        }
      }
      int a = n - 1;
      while (a >= 0 && idx[static_cast<std::size_t>(a)] == last[static_cast<std::size_t>(a)]) {
        idx[static_cast<std::size_t>(a)] = first[static_cast<std::size_t>(a)];
        --a;
      }
      if (a < 0) break;
      ++idx[static_cast<std::size_t>(a)];
    }
  });

  ActionTable table;
  table.per_cell.resize(grid.num_cells());
  for (auto& entries : found) {
    for (auto& [cell, e] : entries) table.per_cell[cell].push_back(std::move(e));
  }
  return table;
}

template <class Action>
std::size_t Model<Action>::num_transitions() const {
  std::size_t total = 0;
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (labels.terminal(s)) continue;
    for (const auto& a : actions[s]) total += transitions_of(a);
  }
  return total;
}

template <class Action>
std::size_t Model<Action>::num_enabled_pairs() const {
  std::size_t total = 0;
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (!labels.terminal(s)) total += actions[s].size();
  }
  return total;
}

template struct Model<RmdpAction>;
template struct Model<ImdpAction>;

double compute_alpha(double beta, std::size_t N, std::size_t M, std::size_t L_max) {
  return beta * static_cast<double>(N) * static_cast<double>(M) * static_cast<double>(L_max);
}

RMDPModel build_rmdp(const ActionTable& table, const PartitionGrid& grid, const TargetCover& cover,
                     const SampleBatch& samples, double beta, const StateLabels& labels, std::uint64_t seed) {
  if (samples.size() == 0) throw Error(ErrorKind::no_samples, "no samples");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::invalid_scenario_parameters, "beta must lie in (0, 1)");
  if (labels.kinds.size() != grid.num_states() || table.per_cell.size() != grid.num_cells()) {
    throw Error(ErrorKind::dimension_mismatch, "build_rmdp: table/labels do not match the grid");
  }
  const std::uint64_t Z = samples.size();

  // One histogram per reference point that some active branch uses.
  std::vector<char> needed(grid.num_cells(), 0);
  for (std::size_t i = 0; i < grid.num_cells(); ++i) {
    if (labels.terminal(PartitionGrid::state_of_cell(i))) continue;
    for (const auto& e : table.per_cell[i]) {
      for (std::size_t b : e.branch_cells) needed[b] = 1;
    }
  }
  std::vector<BinCounts> counts(grid.num_cells());
  parallel_for(grid.num_cells(), [&](std::size_t c) {
    if (needed[c]) counts[c] = bin_counts(grid.reference(c), grid, samples);
  });

  PacIntervalCache pac(Z, beta);
  std::vector<IntervalRow> rows(grid.num_cells());
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    if (!needed[c]) continue;
    IntervalRow& row = rows[c];
    for (const auto& [cell, hits] : counts[c].hits) {
      row.dest.push_back(static_cast<std::uint32_t>(PartitionGrid::state_of_cell(cell)));
      row.prob.push_back(pac(Z - hits));
    }
    row.residual = pac(Z - counts[c].outside);
  }

  RMDPModel model;
  model.labels = labels;
  model.cover = cover;
  model.actions.resize(grid.num_states());
  std::set<std::size_t> used;
  std::size_t L_max = 0;
  for (std::size_t s = 0; s < grid.num_states(); ++s) {
    if (labels.terminal(s)) {
      RmdpAction loop;
      loop.action = kSelfLoopAction;
      IntervalRow row;
      row.dest = {static_cast<std::uint32_t>(s)};
      row.prob = {ProbInterval{1.0, 1.0}};
      loop.branches.push_back(std::move(row));
      model.actions[s].push_back(std::move(loop));
      continue;
    }
    for (const auto& e : table.per_cell[PartitionGrid::cell_of_state(s)]) {
      RmdpAction a;
      a.action = e.action;
      a.branch_cells = e.branch_cells;
      a.branch_positions = e.branch_positions;
      for (std::size_t b : e.branch_cells) a.branches.push_back(rows[b]);
      used.insert(e.action);
      L_max = std::max(L_max, e.branch_cells.size());
      model.actions[s].push_back(std::move(a));
    }
  }

  model.meta.samples = Z;
  model.meta.beta = beta;
  model.meta.seed = seed;
  model.meta.num_cells = grid.num_cells();
  model.meta.cover_size = cover.size();
  model.meta.num_actions = used.size();
  model.meta.max_branches = L_max;
  model.meta.alpha = compute_alpha(beta, grid.num_cells(), used.size(), L_max);
  model.meta.scheme = to_string(cover.scheme);
  return model;
}

IntervalRow merge_rows(const std::vector<IntervalRow>& rows) {
  IntervalRow out;
  if (rows.empty()) return out;
  std::set<std::uint32_t> all;
  for (const auto& r : rows) all.insert(r.dest.begin(), r.dest.end());
  for (std::uint32_t d : all) {
    double lo = 1.0, hi = 0.0;
    for (const auto& r : rows) {
      const auto it = std::lower_bound(r.dest.begin(), r.dest.end(), d);
      if (it != r.dest.end() && *it == d) {
        const auto& p = r.prob[static_cast<std::size_t>(it - r.dest.begin())];
        lo = std::min(lo, p.low);
        hi = std::max(hi, p.high);
      } else {
        lo = 0.0;
      }
    }
    out.dest.push_back(d);
    out.prob.push_back({lo, hi});
  }
  out.residual = rows.front().residual;
  for (const auto& r : rows) {
    out.residual.low = std::min(out.residual.low, r.residual.low);
    out.residual.high = std::max(out.residual.high, r.residual.high);
  }
  return out;
}

IMDPModel embed_imdp(const RMDPModel& rmdp) {
  IMDPModel model;
  model.labels = rmdp.labels;
  model.cover = rmdp.cover;
  model.meta = rmdp.meta;
  model.actions.resize(rmdp.actions.size());
  for (std::size_t s = 0; s < rmdp.actions.size(); ++s) {
    for (const auto& a : rmdp.actions[s]) {
      ImdpAction m;
      m.action = a.action;
      m.branch_cells = a.branch_cells;
      m.branch_positions = a.branch_positions;
      m.row = merge_rows(a.branches);
      model.actions[s].push_back(std::move(m));
    }
  }
  return model;
}

}  // namespace ddimdp
