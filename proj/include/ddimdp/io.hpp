#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddimdp/abstraction.hpp"
#include "ddimdp/synthesis.hpp"
#include "ddimdp/validation.hpp"

namespace ddimdp {

namespace fs = std::filesystem;

// Everything needed to reload a built abstraction and refine its policy.
struct ModelBundle {
  PartitionGrid grid;
  AffineSystem sys;
  RMDPModel rmdp;
};

nlohmann::json to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const nlohmann::json& j);
void save_model(const fs::path& path, const ModelBundle& bundle);
ModelBundle load_model(const fs::path& path);

nlohmann::json policy_to_json(const Policy& policy, const TargetCover& cover);
Policy policy_from_json(const nlohmann::json& j);
void save_policy(const fs::path& path, const Policy& policy, const TargetCover& cover);
Policy load_policy(const fs::path& path);

const char* label_name(StateKind kind);

// Long-format CSV of one value vector: state,cell,x1..xn,label,value where
// x is the cell reference point. State 0 has an empty cell and coordinates.
void write_value_csv(const fs::path& path, const PartitionGrid& grid, const StateLabels& labels,
                     const std::vector<double>& values);
// value column of such a file, indexed by state.
std::vector<double> read_value_csv(const fs::path& path);

// Heatmap of per-cell values over a 2D grid, one rect per cell with a
// tooltip. Throws dimension_mismatch for other dimensions.
std::string heatmap_svg(const PartitionGrid& grid, const std::vector<double>& values, const std::string& title);

void write_trajectory_csv(const fs::path& path, const TrajectoryRecord& rec);

// Explicit-format interval model: <base>.sta, <base>.lab, <base>.tra and
// <base>.props. The residual of a row is a transition to state 0.
void export_prism(const IMDPModel& model, const fs::path& base, int horizon);

struct PrismChoice {
  std::string label;
  IntervalRow row;
};

// Parses <base>.tra back into per-state choices. Transitions to state 0 of
// non-self-loop choices are folded back into the residual.
std::vector<std::vector<PrismChoice>> parse_prism_transitions(const fs::path& base);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace ddimdp
