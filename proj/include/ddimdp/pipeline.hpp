#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddimdp/abstraction.hpp"
#include "ddimdp/io.hpp"
#include "ddimdp/synthesis.hpp"
#include "ddimdp/validation.hpp"

namespace ddimdp {

enum class Mode { stp, mtp, custom };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& name);

struct ValidationConfig {
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::vector<Eigen::VectorXd> initial_states;
  std::vector<std::size_t> initial_cells;  // cell reference points used as x0
  std::optional<std::string> sample_file;  // held-out noise when training noise came from a file
};

struct RunConfig {
  Eigen::MatrixXd A, B;
  HPolytope U;
  Box domain;
  std::vector<int> dims;
  Mode mode = Mode::mtp;
  std::vector<std::vector<std::size_t>> custom_cover;
  RegionSpec goal, unsafe;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double beta = 1e-8;
  int horizon = 1;
  fs::path output;
  bool refined = false;
  bool optimistic = false;
  bool prism = false;
  std::optional<ValidationConfig> validation;
};

// Parses the JSON run configuration; relative file paths resolve against
// base_dir.
RunConfig parse_config(const nlohmann::json& j, const fs::path& base_dir = {});
RunConfig load_config(const fs::path& path);

struct AbstractionResult {
  ModelBundle bundle;
  double seconds = 0.0;
};

// Builds the grid, system, cover, labels and RMDP described by cfg.
AbstractionResult abstract(const RunConfig& cfg);

// Share of regular (non-goal, non-unsafe) cells whose value is positive, in percent.
double reach_percent(const StateLabels& labels, const std::vector<double>& values);

struct RunReport {
  nlohmann::json json;  // written as report.json
  bool empty = false;
};

// abstract -> synthesize -> validate -> artifacts under cfg.output.
RunReport run_pipeline(const RunConfig& cfg);

// Runs the pipeline for STP and MTP at each dims entry and collects a table.
nlohmann::json compare_modes(const RunConfig& cfg, const std::vector<std::vector<int>>& grids);

// Seconds rounded to 0.1.
double round_seconds(double s);

}  // namespace ddimdp
