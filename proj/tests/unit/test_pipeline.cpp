#include <filesystem>

#include "doctest.h"

#include "ddimdp/error.hpp"
#include "ddimdp/pipeline.hpp"

using namespace ddimdp;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "ddimdp_pipeline_test" / name;
  fs::remove_all(p);
  return p;
}

json config_json(const char* name) { return json::parse(read_text(fs::path(DDIMDP_CONFIG_DIR) / name)); }

json small_di() {
  json j = config_json("double_integrator.json");
  j["partition"]["dims"] = {11, 11};
  j["samples"] = 400;
  j["validation"] = {{"seed", 5}, {"runs", 40}, {"initial_cells", {40, 70}}};
  return j;
}

}  // namespace

TEST_CASE("example 1 single-target run is empty but reported") {
  json j = config_json("example1.json");
  j["mode"] = "stp";
  j["samples"] = 500;
  RunConfig c = parse_config(j);
  c.output = scratch("e1_stp");
  const RunReport rep = run_pipeline(c);
  CHECK(rep.empty);
  CHECK(rep.json["transitions"] == 0);
  CHECK(rep.json["enabled_pairs"] == 0);
  CHECK(fs::exists(c.output / "report.json"));
  CHECK(fs::exists(c.output / "heatmap.svg"));
}

TEST_CASE("identical configs reproduce every artifact") {
  RunConfig c = parse_config(small_di());
  c.prism = true;
  const fs::path da = scratch("a"), db = scratch("b");
  c.output = da;
  const RunReport a = run_pipeline(c);
  c.output = db;
  const RunReport b = run_pipeline(c);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(da)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), da);
    ++files;
    if (rel == "report.json") continue;
    CHECK_MESSAGE(read_text(e.path()) == read_text(db / rel), rel.string());
  }
  CHECK(files > 10);
  json ra = a.json, rb = b.json;
  for (auto* r : {&ra, &rb}) {
    r->erase("build_seconds");
    r->erase("synthesis_seconds");
  }
  CHECK(ra == rb);
  CHECK(fs::exists(c.output / "prism" / "model.tra"));
}

TEST_CASE("reach percentage is recomputable from the CSV") {
  RunConfig c = parse_config(small_di());
  c.output = scratch("reach");
  const RunReport rep = run_pipeline(c);
  const auto V = read_value_csv(c.output / rep.json["values"].get<std::string>());
  const ModelBundle b = load_model(c.output / "model.json");
  std::size_t total = 0, positive = 0;
  for (std::size_t s = 0; s < V.size(); ++s) {
    if (b.rmdp.labels.kinds[s] != StateKind::regular) continue;
    ++total;
    positive += V[s] > 0.0;
  }
  CHECK(rep.json["reach_percent"].get<double>() == doctest::Approx(100.0 * positive / total));
  CHECK(rep.json["validation"].size() == 2);
  CHECK(rep.json["alpha"].get<double>() ==
        doctest::Approx(1e-8 * 121 * rep.json["num_actions"].get<double>() * rep.json["max_branches"].get<double>()));
}

TEST_CASE("config validation") {
  json j = small_di();
  j["validation"]["seed"] = j["seed"];
  CHECK_THROWS_AS(parse_config(j), Error);

  j = small_di();
  j.erase("samples");
  CHECK_THROWS_AS(parse_config(j), Error);

  j = small_di();
  j["samples"] = 0;
  CHECK_THROWS_AS(parse_config(j), Error);

  j = small_di();
  j["mode"] = "both";
  CHECK_THROWS_AS(parse_config(j), Error);

  j = small_di();
  j["noise"] = {{"type", "file"}, {"path", "/nonexistent/w.csv"}};
  CHECK_THROWS_AS(parse_config(j), Error);

  j = small_di();
  j["goal"]["align"] = "exact";
  const RunConfig c = parse_config(j);
  CHECK_THROWS_AS(abstract(c), Error);
}

TEST_CASE("file noise needs a held-out validation file") {
  const fs::path dir = scratch("file_noise");
  fs::create_directories(dir);
  write_sample_csv((dir / "train.csv").string(), Eigen::MatrixXd::Zero(10, 2));
  json j = small_di();
  j["noise"] = {{"type", "file"}, {"path", (dir / "train.csv").string()}};
  j["samples"] = 10;
  CHECK_THROWS_AS(parse_config(j), Error);
  j["validation"]["sample_file"] = (dir / "train.csv").string();
  CHECK_NOTHROW(parse_config(j));
}
