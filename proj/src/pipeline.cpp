#include "ddimdp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "ddimdp/error.hpp"

namespace ddimdp {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::VectorXd vec(const json& j, const char* what) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const json::exception&) {
    throw Error(ErrorKind::invalid_config, std::string(what) + " must be a list of numbers");
  }
}

Eigen::MatrixXd mat(const json& j, const char* what) {
  std::vector<std::vector<double>> rows;
  try {
    rows = j.get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::invalid_config, std::string(what) + " must be a list of rows");
  }
  if (rows.empty()) throw Error(ErrorKind::invalid_config, std::string(what) + " is empty");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw Error(ErrorKind::invalid_config, std::string(what) + " is ragged");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

Box box(const json& j, const char* what) {
  if (!j.contains("low") || !j.contains("high")) throw Error(ErrorKind::invalid_config, std::string(what) + " needs low and high");
  Box b(vec(j["low"], what), vec(j["high"], what));
  if (b.low.size() != b.high.size()) throw Error(ErrorKind::invalid_config, std::string(what) + ": low/high sizes differ");
  return b;
}

HPolytope polytope(const json& j, const char* what) {
  if (j.contains("normals")) return HPolytope(mat(j["normals"], what), vec(j.at("offsets"), what));
  return HPolytope(box(j, what));
}

RegionSpec region(const json& j) {
  RegionSpec r;
  if (j.is_null()) return r;
  if (j.contains("cells")) r.cells = j["cells"].get<std::vector<std::size_t>>();
  if (j.contains("boxes")) {
    for (const auto& b : j["boxes"]) r.boxes.push_back(box(b, "region box"));
  }
  if (j.contains("align")) r.align = align_rule_from_string(j["align"].get<std::string>());
  return r;
}

GaussianNoise gaussian(const json& j, int n) {
  GaussianNoise g;
  g.mean = j.contains("mean") ? vec(j["mean"], "noise mean") : Eigen::VectorXd::Zero(n);
  const json& cov = j.at("covariance");
  g.covariance = cov.is_number() ? Eigen::MatrixXd(cov.get<double>() * Eigen::MatrixXd::Identity(n, n))
                                 : mat(cov, "noise covariance");
  return g;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

NoiseSpec noise(const json& j, int n, const fs::path& base) {
  const std::string type = j.value("type", "gaussian");
  if (type == "gaussian") return gaussian(j, n);
  if (type == "uniform") return UniformNoise{box(j, "uniform noise")};
  if (type == "mixture") {
    MixtureNoise m;
    m.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& c : j.at("components")) m.components.push_back(gaussian(c, n));
    return m;
  }
  if (type == "file") {
    const fs::path path = resolve(base, j.at("path").get<std::string>());
    return SampleFileNoise{path.string(), read_sample_csv(path.string())};
  }
  throw Error(ErrorKind::invalid_config, "unknown noise type '" + type + "'");
}

CoverScheme scheme_of(Mode m) {
  switch (m) {
    case Mode::stp:
      return CoverScheme::singletons;
    case Mode::mtp:
      return CoverScheme::axis_pairs;
    case Mode::custom:
      return CoverScheme::custom;
  }
  return CoverScheme::singletons;
}

std::string dims_name(const std::vector<int>& dims) {
  std::string s;
  for (std::size_t a = 0; a < dims.size(); ++a) s += (a ? "x" : "") + std::to_string(dims[a]);
  return s;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::stp:
      return "stp";
    case Mode::mtp:
      return "mtp";
    case Mode::custom:
      return "custom";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& name) {
  if (name == "stp") return Mode::stp;
  if (name == "mtp") return Mode::mtp;
  if (name == "custom") return Mode::custom;
  throw Error(ErrorKind::invalid_config, "mode must be stp, mtp or custom, got '" + name + "'");
}

double round_seconds(double s) { return std::round(s * 10.0) / 10.0; }

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  try {
    RunConfig c;
    const json& sys = j.at("system");
    c.A = mat(sys.at("A"), "system.A");
    c.B = mat(sys.at("B"), "system.B");
    c.U = polytope(sys.at("U"), "system.U");
    c.domain = box(sys.at("domain"), "system.domain");
    const int n = c.domain.dim();
    if (c.A.rows() != n || c.A.cols() != n || c.B.rows() != n || c.B.cols() != n || c.U.dim() != n) {
      throw Error(ErrorKind::invalid_config, "system matrices, U and domain must share dimension " + std::to_string(n));
    }
    c.dims = j.at("partition").at("dims").get<std::vector<int>>();
    c.mode = mode_from_string(j.value("mode", "mtp"));
    if (c.mode == Mode::custom) c.custom_cover = j.at("cover").get<std::vector<std::vector<std::size_t>>>();
    c.goal = region(j.value("goal", json()));
    c.unsafe = region(j.value("unsafe", json()));
    c.noise = noise(j.at("noise"), n, base_dir);
    c.seed = j.at("seed").get<std::uint64_t>();
    c.samples = j.at("samples").get<std::size_t>();
    if (c.samples < 1) throw Error(ErrorKind::invalid_config, "samples must be at least 1");
    c.beta = j.value("beta", 1e-8);
    if (!(c.beta > 0.0 && c.beta < 1.0)) throw Error(ErrorKind::invalid_config, "beta must lie in (0, 1)");
    c.horizon = j.at("horizon").get<int>();
    if (c.horizon < 1) throw Error(ErrorKind::invalid_config, "horizon must be at least 1");
    c.output = resolve(base_dir, j.value("output", std::string("out")));
    c.refined = j.value("refined", false);
    c.optimistic = j.value("optimistic", false);
    c.prism = j.value("prism", false);
    if (j.contains("validation")) {
      const json& v = j["validation"];
      ValidationConfig vc;
      vc.seed = v.at("seed").get<std::uint64_t>();
      vc.runs = v.value("runs", std::size_t{1000});
      if (vc.runs < 1) throw Error(ErrorKind::invalid_config, "validation.runs must be at least 1");
      if (vc.seed == c.seed) throw Error(ErrorKind::invalid_config, "validation seed must differ from the abstraction seed");
      if (v.contains("initial_states")) {
        for (const auto& x : v["initial_states"]) vc.initial_states.push_back(vec(x, "validation.initial_states"));
      }
      if (v.contains("initial_cells")) vc.initial_cells = v["initial_cells"].get<std::vector<std::size_t>>();
      if (v.contains("sample_file")) vc.sample_file = resolve(base_dir, v["sample_file"].get<std::string>()).string();
      if (std::holds_alternative<SampleFileNoise>(c.noise) && !vc.sample_file) {
        throw Error(ErrorKind::invalid_config, "file-based noise needs a held-out validation.sample_file");
      }
      c.validation = std::move(vc);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_config, e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_config, path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

AbstractionResult abstract(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  PartitionGrid grid = build_partition(cfg.domain, cfg.dims);
  AffineSystem sys(cfg.A, cfg.B, cfg.U, cfg.domain);
  const TargetCover cover = build_target_cover(
      grid, scheme_of(cfg.mode),
      cfg.mode == Mode::custom ? std::optional(cfg.custom_cover) : std::nullopt);
  const auto goal = resolve_region(grid, cfg.goal);
  const auto unsafe = resolve_region(grid, cfg.unsafe);
  const StateLabels labels = make_labels(grid, goal, unsafe);

  std::vector<bool> skip(grid.num_cells());
  for (std::size_t c = 0; c < grid.num_cells(); ++c) skip[c] = labels.terminal(PartitionGrid::state_of_cell(c));
  const ActionTable table = compute_action_table(grid, cover, sys, &skip);

  NoiseSource source(cfg.noise, cfg.seed);
  if (source.dim() != grid.dim()) throw Error(ErrorKind::dimension_mismatch, "noise dimension differs from the state");
  const SampleBatch samples = source.draw_batch(cfg.samples);
  RMDPModel rmdp = build_rmdp(table, grid, cover, samples, cfg.beta, labels, cfg.seed);
  return {ModelBundle{std::move(grid), std::move(sys), std::move(rmdp)}, since(t0)};
}

double reach_percent(const StateLabels& labels, const std::vector<double>& values) {
  std::size_t total = 0, positive = 0;
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (labels.kinds[s] != StateKind::regular) continue;
    ++total;
    if (values[s] > 0.0) ++positive;
  }
  return total ? 100.0 * static_cast<double>(positive) / static_cast<double>(total) : 0.0;
}

namespace {

double reach_percent_all_cells(const StateLabels& labels, const std::vector<double>& values) {
  std::size_t total = 0, positive = 0;
  for (std::size_t s = 1; s < values.size(); ++s) {
    if (labels.kinds[s] == StateKind::absorbing) continue;
    ++total;
    if (values[s] > 0.0) ++positive;
  }
  return total ? 100.0 * static_cast<double>(positive) / static_cast<double>(total) : 0.0;
}

json validate(const RunConfig& cfg, const ModelBundle& b, const SynthesisResult& res) {
  const ValidationConfig& vc = *cfg.validation;
  const Controller ctrl = refine_controller(res.policy, b.rmdp.cover, b.grid, b.sys, b.rmdp.labels);
  const NoiseSource noise = vc.sample_file ? NoiseSource::from_file(*vc.sample_file, vc.seed)
                                           : NoiseSource(cfg.noise, vc.seed);
  std::vector<Eigen::VectorXd> starts = vc.initial_states;
  for (std::size_t c : vc.initial_cells) starts.push_back(b.grid.reference(c));
  json out = json::array();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Eigen::VectorXd& x0 = starts[i];
    const double eta = res.values.final()[b.grid.state_of(x0)];
    const ValidationSummary v = monte_carlo_validate(ctrl, x0, vc.runs, noise);
    NoiseSource first = noise.substream(0);
    write_trajectory_csv(cfg.output / "trajectories" / ("start_" + std::to_string(i) + ".csv"),
                         simulate_trajectory(ctrl, x0, first));
    out.push_back({{"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                   {"state", b.grid.state_of(x0)},
                   {"certified", eta},
                   {"runs", v.runs},
                   {"p_hat", v.p_hat},
                   {"ci_halfwidth", v.ci_halfwidth},
                   {"verdict", v.p_hat + v.ci_halfwidth >= eta ? "consistent" : "violated"}});
  }
  return out;
}

}  // namespace

RunReport run_pipeline(const RunConfig& cfg) {
  RunReport report;
  AbstractionResult built = abstract(cfg);
  const ModelBundle& b = built.bundle;
  fs::create_directories(cfg.output);
  save_model(cfg.output / "model.json", b);

  const auto t0 = Clock::now();
  const IMDPModel imdp = embed_imdp(b.rmdp);
  SynthesisOptions opts;
  opts.bound = cfg.optimistic ? Bound::upper : Bound::lower;
  const SynthesisResult embedded = robust_value_iteration(imdp, cfg.horizon, opts);
  std::optional<SynthesisResult> refined;
  if (cfg.refined) refined = rmdp_refined_value_iteration(b.rmdp, cfg.horizon, opts);
  const double synth_seconds = since(t0);
  const SynthesisResult& res = refined ? *refined : embedded;

  for (int k = 0; k <= cfg.horizon; ++k) {
    write_value_csv(cfg.output / "values" / ("step_" + std::to_string(k) + ".csv"), b.grid, b.rmdp.labels,
                    res.values.V[static_cast<std::size_t>(k)]);
  }
  if (b.grid.dim() == 2) {
    write_text(cfg.output / "heatmap.svg",
               heatmap_svg(b.grid, res.values.final(),
                           "Lower bound on reaching the goal within " + std::to_string(cfg.horizon) + " steps"));
  }
  save_policy(cfg.output / "policy.json", res.policy, b.rmdp.cover);
  if (cfg.prism) export_prism(imdp, cfg.output / "prism" / "model", cfg.horizon);

  const auto& V = res.values.final();
  std::size_t above_half = 0;
  double best = 0.0;
  for (std::size_t s = 0; s < V.size(); ++s) {
    if (b.rmdp.labels.kinds[s] != StateKind::regular) continue;
    best = std::max(best, V[s]);
    if (V[s] > 0.5) ++above_half;
  }
  const auto& meta = b.rmdp.meta;
  report.empty = b.rmdp.num_enabled_pairs() == 0;
  json& r = report.json;
  r["mode"] = to_string(cfg.mode);
  r["scheme"] = meta.scheme;
  r["dims"] = cfg.dims;
  r["num_states"] = b.rmdp.num_states();
  r["cover_size"] = meta.cover_size;
  r["enabled_pairs"] = b.rmdp.num_enabled_pairs();
  r["num_actions"] = meta.num_actions;
  r["max_branches"] = meta.max_branches;
  r["transitions"] = b.rmdp.num_transitions();
  r["imdp_transitions"] = imdp.num_transitions();
  r["samples"] = meta.samples;
  r["beta"] = meta.beta;
  r["seed"] = meta.seed;
  r["alpha"] = meta.alpha;
  r["alpha_cover"] = compute_alpha(meta.beta, meta.num_cells, meta.cover_size, meta.max_branches);
  r["horizon"] = cfg.horizon;
  r["bound"] = cfg.optimistic ? "upper" : "lower";
  r["backup"] = refined ? "rmdp-refined" : "imdp";
  r["reach_percent"] = reach_percent(b.rmdp.labels, V);
  r["reach_percent_all_cells"] = reach_percent_all_cells(b.rmdp.labels, V);
  if (refined) r["reach_percent_embedded"] = reach_percent(b.rmdp.labels, embedded.values.final());
  r["max_lower_bound"] = best;
  r["states_above_half"] = above_half;
  r["empty"] = report.empty;
  r["build_seconds"] = round_seconds(built.seconds);
  r["synthesis_seconds"] = round_seconds(synth_seconds);
  r["policy"] = "policy.json";
  r["values"] = "values/step_" + std::to_string(cfg.horizon) + ".csv";
  r["model"] = "model.json";
  if (cfg.validation) r["validation"] = validate(cfg, b, res);
  write_text(cfg.output / "report.json", r.dump(2) + "\n");
  return report;
}

json compare_modes(const RunConfig& cfg, const std::vector<std::vector<int>>& grids) {
  json rows = json::array();
  for (const auto& dims : grids) {
    json row = {{"dims", dims}};
    for (Mode m : {Mode::stp, Mode::mtp}) {
      RunConfig c = cfg;
      c.dims = dims;
      c.mode = m;
      c.validation.reset();
      c.output = cfg.output / dims_name(dims) / to_string(m);
      const RunReport rep = run_pipeline(c);
      const json& r = rep.json;
      row[to_string(m)] = {{"empty", rep.empty},
                           {"transitions", r["transitions"]},
                           {"seconds", round_seconds(r["build_seconds"].get<double>() + r["synthesis_seconds"].get<double>())},
                           {"reach_percent", r["reach_percent"]},
                           {"reach_percent_all_cells", r["reach_percent_all_cells"]},
                           {"alpha", r["alpha"]}};
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ddimdp
