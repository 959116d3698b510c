// Command-line driver: abstract, synthesize, simulate, report, export-prism,
// compare.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ddimdp/error.hpp"
#include "ddimdp/kernels.hpp"
#include "ddimdp/pipeline.hpp"

using namespace ddimdp;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::size_t> samples;
  std::optional<double> beta;
  std::optional<int> horizon;
  std::vector<int> dims;
  bool refined = false;
  bool optimistic = false;
  bool prism = false;
};

void add_run_flags(CLI::App* cmd, Overrides& o, bool strict) {
  auto* seed = cmd->add_option("--seed", o.seed, "noise seed for the abstraction samples");
  auto* out = cmd->add_option("--out", o.out, "output directory");
  auto* mode = cmd->add_option("--mode", o.mode, "stp, mtp or custom")->check(CLI::IsMember({"stp", "mtp", "custom"}));
  if (strict) {
    seed->required();
    out->required();
    mode->required();
  }
  cmd->add_option("--samples", o.samples, "number of noise samples Z");
  cmd->add_option("--beta", o.beta, "per-interval confidence parameter");
  cmd->add_option("--horizon", o.horizon, "horizon K");
  cmd->add_option("--dims", o.dims, "cells per axis")->expected(1, -1);
  cmd->add_flag("--refined", o.refined, "use the per-branch RMDP backup");
  cmd->add_flag("--optimistic", o.optimistic, "compute upper bounds instead of lower bounds");
  cmd->add_flag("--prism", o.prism, "also write the explicit interval model");
}

RunConfig configure(const std::string& path, const Overrides& o) {
  RunConfig c = load_config(path);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output = *o.out;
  if (o.mode) c.mode = mode_from_string(*o.mode);
  if (o.samples) c.samples = *o.samples;
  if (o.beta) c.beta = *o.beta;
  if (o.horizon) c.horizon = *o.horizon;
  if (!o.dims.empty()) c.dims = o.dims;
  c.refined = c.refined || o.refined;
  c.optimistic = c.optimistic || o.optimistic;
  c.prism = c.prism || o.prism;
  if (c.validation && c.validation->seed == c.seed) {
    throw Error(ErrorKind::invalid_config, "validation seed must differ from the abstraction seed");
  }
  return c;
}

void print_summary(const RunReport& rep) {
  const json& r = rep.json;
  std::cout << "mode " << r["mode"].get<std::string>() << ": " << r["transitions"] << " transitions, "
            << r["enabled_pairs"] << " enabled (state, action) pairs, alpha " << r["alpha"] << ", reach "
            << r["reach_percent"] << "%, build " << r["build_seconds"] << " s, synthesis " << r["synthesis_seconds"]
            << " s\n";
  if (rep.empty) std::cerr << "note: the abstraction has no enabled actions (empty iMDP)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven interval MDP abstraction and reach-avoid synthesis"};
  app.require_subcommand(1);
  std::string config;
  Overrides o;

  auto* abs = app.add_subcommand("abstract", "build the abstraction and write model.json");
  abs->add_option("config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_run_flags(abs, o, true);

  auto* run = app.add_subcommand("report", "run the full pipeline and write report.json with all artifacts");
  run->add_option("config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  add_run_flags(run, o, false);

  std::string model_path, policy_path;
  int horizon = 0;
  auto* syn = app.add_subcommand("synthesize", "value iteration on a saved model");
  syn->add_option("model", model_path, "model.json")->required()->check(CLI::ExistingFile);
  syn->add_option("--horizon", horizon, "horizon K")->required();
  syn->add_option("--out", o.out, "output directory")->required();
  syn->add_flag("--refined", o.refined, "use the per-branch RMDP backup");
  syn->add_flag("--optimistic", o.optimistic, "compute upper bounds");

  std::vector<double> x0;
  std::uint64_t sim_seed = 0;
  std::size_t runs = 1000;
  std::string noise_config;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of a policy from x0");
  sim->add_option("model", model_path, "model.json")->required()->check(CLI::ExistingFile);
  sim->add_option("policy", policy_path, "policy.json")->required()->check(CLI::ExistingFile);
  sim->add_option("--config", noise_config, "run configuration providing the noise model")->required();
  sim->add_option("--x0", x0, "initial state")->required()->expected(1, -1);
  sim->add_option("--seed", sim_seed, "validation seed")->required();
  sim->add_option("--runs", runs, "number of runs");
  sim->add_option("--trajectory", o.out, "write the first run as CSV");

  auto* exp = app.add_subcommand("export-prism", "write the embedded iMDP in explicit interval form");
  exp->add_option("model", model_path, "model.json")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", o.out, "output base path (no extension)")->required();
  exp->add_option("--horizon", horizon, "horizon used in the property file")->required();

  std::vector<int> sizes;
  auto* cmp = app.add_subcommand("compare", "STP versus MTP over several grid sizes");
  cmp->add_option("config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmp->add_option("--sizes", sizes, "cells per axis, one entry per grid")->required()->expected(1, -1);
  add_run_flags(cmp, o, false);

  std::string isa;
  app.add_option("--isa", isa, "force kernel variant (scalar or avx2)")->check(CLI::IsMember({"scalar", "avx2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits 0
  }

  try {
    if (!isa.empty() && !kernels::set_isa(isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar)) {
      std::cerr << "error: " << isa << " kernels are not available on this machine\n";
      return 2;
    }
    if (*abs) {
      const RunConfig c = configure(config, o);
      const AbstractionResult r = abstract(c);
      save_model(c.output / "model.json", r.bundle);
      const auto& m = r.bundle.rmdp;
      std::cout << m.num_transitions() << " transitions, " << m.num_enabled_pairs() << " enabled pairs, alpha "
                << m.meta.alpha << ", " << round_seconds(r.seconds) << " s\n";
      if (m.num_enabled_pairs() == 0) std::cerr << "note: the abstraction has no enabled actions (empty iMDP)\n";
    } else if (*run) {
      print_summary(run_pipeline(configure(config, o)));
    } else if (*syn) {
      const ModelBundle b = load_model(model_path);
      SynthesisOptions opts;
      opts.bound = o.optimistic ? Bound::upper : Bound::lower;
      const SynthesisResult res = o.refined ? rmdp_refined_value_iteration(b.rmdp, horizon, opts)
                                            : robust_value_iteration(embed_imdp(b.rmdp), horizon, opts);
      const fs::path out(*o.out);
      for (int k = 0; k <= horizon; ++k) {
        write_value_csv(out / "values" / ("step_" + std::to_string(k) + ".csv"), b.grid, b.rmdp.labels,
                        res.values.V[static_cast<std::size_t>(k)]);
      }
      save_policy(out / "policy.json", res.policy, b.rmdp.cover);
      if (b.grid.dim() == 2) write_text(out / "heatmap.svg", heatmap_svg(b.grid, res.values.final(), "Lower bound"));
      std::cout << "reach " << reach_percent(b.rmdp.labels, res.values.final()) << "%\n";
    } else if (*sim) {
      const ModelBundle b = load_model(model_path);
      const Policy policy = load_policy(policy_path);
      const RunConfig c = load_config(noise_config);
      if (sim_seed == c.seed) throw Error(ErrorKind::invalid_config, "validation seed must differ from the abstraction seed");
      const Controller ctrl = refine_controller(policy, b.rmdp.cover, b.grid, b.sys, b.rmdp.labels);
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
      NoiseSource noise = c.validation && c.validation->sample_file
                              ? NoiseSource::from_file(*c.validation->sample_file, sim_seed)
                              : NoiseSource(c.noise, sim_seed);
      const ValidationSummary v = monte_carlo_validate(ctrl, x, runs, noise);
      if (o.out) {
        NoiseSource first = noise.substream(0);
        write_trajectory_csv(*o.out, simulate_trajectory(ctrl, x, first));
      }
      std::cout << json{{"p_hat", v.p_hat}, {"ci_halfwidth", v.ci_halfwidth}, {"runs", v.runs}}.dump() << "\n";
    } else if (*exp) {
      const ModelBundle b = load_model(model_path);
      export_prism(embed_imdp(b.rmdp), *o.out, horizon);
    } else if (*cmp) {
      RunConfig c = configure(config, o);
      std::vector<std::vector<int>> grids;
      for (int g : sizes) grids.push_back(std::vector<int>(static_cast<std::size_t>(c.domain.dim()), g));
      const json table = compare_modes(c, grids);
      write_text(c.output / "compare.json", table.dump(2) + "\n");
      // reach: regular cells only; reach*: share of all cells, goal included.
      std::printf("%-8s %9s %9s %6s %6s %9s %9s %9s %9s %10s\n", "grid", "trans STP", "trans MTP", "t STP", "t MTP",
                  "reach STP", "reach MTP", "reach* STP", "reach* MTP", "alpha MTP");
      const auto num = [](const json& r, const char* key, const char* f) {
        if (r["empty"].get<bool>()) return std::string("--");
        char buf[32];
        std::snprintf(buf, sizeof buf, f, r[key].get<double>());
        return std::string(buf);
      };
      for (const auto& row : table) {
        const auto& s = row["stp"];
        const auto& m = row["mtp"];
        std::string name;
        for (int d : row["dims"]) name += (name.empty() ? "" : "x") + std::to_string(d);
        std::printf("%-8s %9s %9s %6.1f %6.1f %9s %9s %10s %10s %10.3g\n", name.c_str(),
                    num(s, "transitions", "%.0f").c_str(), num(m, "transitions", "%.0f").c_str(),
                    s["seconds"].get<double>(), m["seconds"].get<double>(), num(s, "reach_percent", "%.1f").c_str(),
                    num(m, "reach_percent", "%.1f").c_str(), num(s, "reach_percent_all_cells", "%.1f").c_str(),
                    num(m, "reach_percent_all_cells", "%.1f").c_str(), m["alpha"].get<double>());
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
