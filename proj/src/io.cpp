#include "ddimdp/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddimdp/error.hpp"

namespace ddimdp {

using nlohmann::json;

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd json_mat(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw Error(ErrorKind::invalid_config, "ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

json row_json(const IntervalRow& row) {
  std::vector<double> lo, hi;
  for (const auto& p : row.prob) {
    lo.push_back(p.low);
    hi.push_back(p.high);
  }
  return {{"dest", row.dest}, {"low", lo}, {"high", hi}, {"residual", {row.residual.low, row.residual.high}}};
}

IntervalRow json_row(const json& j) {
  IntervalRow row;
  row.dest = j.at("dest").get<std::vector<std::uint32_t>>();
  const auto lo = j.at("low").get<std::vector<double>>();
  const auto hi = j.at("high").get<std::vector<double>>();
  if (lo.size() != row.dest.size() || hi.size() != row.dest.size()) {
    throw Error(ErrorKind::io, "interval row arrays differ in length");
  }
  for (std::size_t d = 0; d < lo.size(); ++d) row.prob.push_back({lo[d], hi[d]});
  row.residual = {j.at("residual").at(0).get<double>(), j.at("residual").at(1).get<double>()};
  return row;
}

std::int64_t action_id(std::size_t a) { return a == kSelfLoopAction ? -1 : static_cast<std::int64_t>(a); }
std::size_t action_from(std::int64_t a) { return a < 0 ? kSelfLoopAction : static_cast<std::size_t>(a); }

std::string fmt(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorKind::io, "bad number '" + std::string(s) + "'");
  return v;
}

// 256-entry ramp from dark purple through teal to yellow.
std::string ramp_color(double v) {
  static const std::array<std::array<double, 3>, 5> anchors{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  const int step = std::clamp(static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)), 0, 255);
  const double t = step / 255.0 * (anchors.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), anchors.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c])));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* label_name(StateKind kind) {
  switch (kind) {
    case StateKind::absorbing:
      return "absorbing";
    case StateKind::goal:
      return "goal";
    case StateKind::unsafe:
      return "unsafe";
    case StateKind::regular:
      return "regular";
  }
  return "unknown";
}

json to_json(const ModelBundle& b) {
  const auto& m = b.rmdp;
  json j;
  j["format"] = "ddimdp-rmdp";
  j["version"] = 1;
  j["grid"] = {{"low", vec_json(b.grid.domain().low)}, {"high", vec_json(b.grid.domain().high)}, {"dims", b.grid.dims()}};
  j["system"] = {{"A", mat_json(b.sys.A())},
                 {"B", mat_json(b.sys.B())},
                 {"U", {{"normals", mat_json(b.sys.U().normals())}, {"offsets", vec_json(b.sys.U().offsets())}}}};
  j["meta"] = {{"samples", m.meta.samples},          {"beta", m.meta.beta},
               {"seed", m.meta.seed},                {"num_cells", m.meta.num_cells},
               {"cover_size", m.meta.cover_size},    {"num_actions", m.meta.num_actions},
               {"max_branches", m.meta.max_branches}, {"alpha", m.meta.alpha},
               {"scheme", m.meta.scheme}};
  std::vector<std::size_t> goal, unsafe;
  for (std::size_t s = 0; s < m.labels.kinds.size(); ++s) {
    if (m.labels.kinds[s] == StateKind::goal) goal.push_back(s);
    if (m.labels.kinds[s] == StateKind::unsafe) unsafe.push_back(s);
  }
  j["labels"] = {{"goal", goal}, {"unsafe", unsafe}};
  j["cover"] = {{"scheme", to_string(m.cover.scheme)}, {"targets", m.cover.targets}};
  json states = json::array();
  for (const auto& acts : m.actions) {
    json list = json::array();
    for (const auto& a : acts) {
      json branches = json::array();
      for (const auto& row : a.branches) branches.push_back(row_json(row));
      list.push_back({{"action", action_id(a.action)},
                      {"branch_cells", a.branch_cells},
                      {"branch_positions", a.branch_positions},
                      {"branches", std::move(branches)}});
    }
    states.push_back(std::move(list));
  }
  j["actions"] = std::move(states);
  return j;
}

ModelBundle model_from_json(const json& j) {
  try {
    if (j.at("format") != "ddimdp-rmdp") throw Error(ErrorKind::io, "not a model file");
    const auto& g = j.at("grid");
    PartitionGrid grid(Box(json_vec(g.at("low")), json_vec(g.at("high"))), g.at("dims").get<std::vector<int>>());
    const auto& sj = j.at("system");
    AffineSystem sys(json_mat(sj.at("A")), json_mat(sj.at("B")),
                     HPolytope(json_mat(sj.at("U").at("normals")), json_vec(sj.at("U").at("offsets"))),
                     grid.domain());
    RMDPModel m;
    const auto& meta = j.at("meta");
    m.meta.samples = meta.at("samples");
    m.meta.beta = meta.at("beta");
    m.meta.seed = meta.at("seed");
    m.meta.num_cells = meta.at("num_cells");
    m.meta.cover_size = meta.at("cover_size");
    m.meta.num_actions = meta.at("num_actions");
    m.meta.max_branches = meta.at("max_branches");
    m.meta.alpha = meta.at("alpha");
    m.meta.scheme = meta.at("scheme");
    m.cover.scheme = cover_scheme_from_string(j.at("cover").at("scheme"));
    m.cover.targets = j.at("cover").at("targets").get<std::vector<std::vector<std::size_t>>>();
    m.labels.kinds.assign(grid.num_states(), StateKind::regular);
    m.labels.kinds[PartitionGrid::kAbsorbingState] = StateKind::absorbing;
    for (std::size_t s : j.at("labels").at("unsafe").get<std::vector<std::size_t>>()) m.labels.kinds.at(s) = StateKind::unsafe;
    for (std::size_t s : j.at("labels").at("goal").get<std::vector<std::size_t>>()) m.labels.kinds.at(s) = StateKind::goal;
    const auto& states = j.at("actions");
    if (states.size() != grid.num_states()) throw Error(ErrorKind::io, "action list does not match the grid");
    m.actions.resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      for (const auto& aj : states[s]) {
        RmdpAction a;
        a.action = action_from(aj.at("action").get<std::int64_t>());
        a.branch_cells = aj.at("branch_cells").get<std::vector<std::size_t>>();
        a.branch_positions = aj.at("branch_positions").get<std::vector<int>>();
        for (const auto& r : aj.at("branches")) a.branches.push_back(json_row(r));
        m.actions[s].push_back(std::move(a));
      }
    }
    return ModelBundle{std::move(grid), std::move(sys), std::move(m)};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed model: ") + e.what());
  }
}

void save_model(const fs::path& path, const ModelBundle& bundle) { write_text(path, to_json(bundle).dump() + "\n"); }

ModelBundle load_model(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

json policy_to_json(const Policy& policy, const TargetCover& cover) {
  std::vector<std::int64_t> used;
  for (const auto& step : policy.action) {
    for (auto a : step) {
      if (a != kNoAction) used.push_back(a);
    }
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  json targets = json::object();
  for (auto a : used) targets[std::to_string(a)] = cover.targets.at(static_cast<std::size_t>(a));
  return {{"format", "ddimdp-policy"}, {"horizon", policy.horizon()}, {"actions", policy.action}, {"targets", targets}};
}

Policy policy_from_json(const json& j) {
  try {
    Policy p;
    p.action = j.at("actions").get<std::vector<std::vector<std::int64_t>>>();
    if (static_cast<int>(p.action.size()) != j.at("horizon").get<int>()) throw Error(ErrorKind::io, "policy horizon");
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed policy: ") + e.what());
  }
}

void save_policy(const fs::path& path, const Policy& policy, const TargetCover& cover) {
  write_text(path, policy_to_json(policy, cover).dump() + "\n");
}

Policy load_policy(const fs::path& path) {
  try {
    return policy_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, path.string() + ": " + e.what());
  }
}

void write_value_csv(const fs::path& path, const PartitionGrid& grid, const StateLabels& labels,
                     const std::vector<double>& values) {
  if (values.size() != grid.num_states()) throw Error(ErrorKind::dimension_mismatch, "value vector size");
  std::string out = "state,cell";
  for (int a = 0; a < grid.dim(); ++a) out += ",x" + std::to_string(a + 1);
  out += ",label,value\n";
  for (std::size_t s = 0; s < values.size(); ++s) {
    out += std::to_string(s);
    if (s == PartitionGrid::kAbsorbingState) {
      out += ",";
      for (int a = 0; a < grid.dim(); ++a) out += ",";
    } else {
      const std::size_t c = PartitionGrid::cell_of_state(s);
      out += "," + std::to_string(c);
      const Eigen::VectorXd ref = grid.reference(c);
      for (int a = 0; a < grid.dim(); ++a) out += "," + fmt(ref(a));
    }
    out += ",";
    out += label_name(labels.kinds[s]);
    out += "," + fmt(values[s]) + "\n";
  }
  write_text(path, out);
}

std::vector<double> read_value_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw Error(ErrorKind::io, "bad value line '" + line + "'");
    out.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  return out;
}

std::string heatmap_svg(const PartitionGrid& grid, const std::vector<double>& values, const std::string& title) {
  if (grid.dim() != 2) throw Error(ErrorKind::dimension_mismatch, "heatmap needs a 2D grid");
  const int nx = grid.dims()[0], ny = grid.dims()[1];
  const double px = std::max(4.0, std::floor(600.0 / std::max(nx, ny)));
  const double margin = 40.0, bar = 24.0;
  const double W = nx * px + 2 * margin + bar + 50.0, H = ny * px + 2 * margin;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
  svg << "<title>" << title << "</title>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << margin * 0.6 << "\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    const auto idx = grid.multi_index(c);
    const std::size_t s = PartitionGrid::state_of_cell(c);
    const double x = margin + idx[0] * px;
    const double y = margin + (ny - 1 - idx[1]) * px;  // first axis right, second axis up
    svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << px << "\" height=\"" << px << "\" fill=\""
        << ramp_color(values[s]) << "\"><title>state " << s << ": " << fmt(values[s]) << "</title></rect>\n";
  }
  const double bx = margin + nx * px + 16.0;
  for (int i = 0; i < 256; ++i) {
    const double h = ny * px / 256.0;
    svg << "<rect x=\"" << bx << "\" y=\"" << margin + (255 - i) * h << "\" width=\"" << bar << "\" height=\"" << h + 0.5
        << "\" fill=\"" << ramp_color(i / 255.0) << "\"/>\n";
  }
  svg << "<text x=\"" << bx + bar + 4 << "\" y=\"" << margin + 10 << "\" font-family=\"sans-serif\" font-size=\"11\">1</text>\n";
  svg << "<text x=\"" << bx + bar + 4 << "\" y=\"" << margin + ny * px << "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_trajectory_csv(const fs::path& path, const TrajectoryRecord& rec) {
  const int n = rec.states.empty() ? 0 : static_cast<int>(rec.states.front().size());
  std::string out = "k";
  for (int a = 0; a < n; ++a) out += ",x" + std::to_string(a + 1);
  for (int a = 0; a < n; ++a) out += ",u" + std::to_string(a + 1);
  out += ",action,branch,state\n";
  for (std::size_t k = 0; k < rec.states.size(); ++k) {
    out += std::to_string(k);
    for (int a = 0; a < n; ++a) out += "," + fmt(rec.states[k](a));
    const bool acted = k < rec.inputs.size();
    for (int a = 0; a < n; ++a) out += acted ? "," + fmt(rec.inputs[k](a)) : std::string(",");
    out += acted ? "," + std::to_string(rec.actions[k]) + "," + std::to_string(rec.branches[k]) : std::string(",,");
    out += k < rec.abstract_states.size() ? "," + std::to_string(rec.abstract_states[k]) : std::string(",");
    out += "\n";
  }
  out += "# outcome=" + std::string(to_string(rec.outcome)) + " satisfied=" + (rec.satisfied ? "1" : "0") + "\n";
  write_text(path, out);
}

void export_prism(const IMDPModel& model, const fs::path& base, int horizon) {
  const std::size_t S = model.num_states();
  std::string sta = "(s)\n", lab = "0=\"goal\" 1=\"unsafe\" 2=\"absorbing\"\n", tra;
  std::size_t choices = 0, transitions = 0;
  for (std::size_t s = 0; s < S; ++s) {
    sta += std::to_string(s) + ":(" + std::to_string(s) + ")\n";
    switch (model.labels.kinds[s]) {
      case StateKind::goal:
        lab += std::to_string(s) + ": 0\n";
        break;
      case StateKind::unsafe:
        lab += std::to_string(s) + ": 1\n";
        break;
      case StateKind::absorbing:
        lab += std::to_string(s) + ": 2\n";
        break;
      case StateKind::regular:
        break;
    }
    for (std::size_t c = 0; c < model.actions[s].size(); ++c) {
      const auto& a = model.actions[s][c];
      const std::string label = a.action == kSelfLoopAction ? "loop" : "a" + std::to_string(a.action);
      const std::string head = std::to_string(s) + " " + std::to_string(c) + " ";
      auto line = [&](std::size_t d, const ProbInterval& p) {
        tra += head + std::to_string(d) + " [" + fmt(p.low) + "," + fmt(p.high) + "] " + label + "\n";
        ++transitions;
      };
      // State 0 sorts first, so the residual leads the row.
      if (a.row.residual.high > 0.0) line(PartitionGrid::kAbsorbingState, a.row.residual);
      for (std::size_t d = 0; d < a.row.dest.size(); ++d) line(a.row.dest[d], a.row.prob[d]);
      ++choices;
    }
  }
  write_text(base.string() + ".sta", sta);
  write_text(base.string() + ".lab", lab);
  write_text(base.string() + ".tra", std::to_string(S) + " " + std::to_string(choices) + " " +
                                          std::to_string(transitions) + "\n" + tra);
  write_text(base.string() + ".props",
             "// Interval MDP in explicit form: .tra lines read \"src choice dst [low,high] action\".\n"
             "// State 0 collects the residual mass (out of domain or unobserved successors).\n"
             "Pmaxmin=? [ !\"unsafe\" U<=" +
                 std::to_string(horizon) + " \"goal\" ]\n");
}

std::vector<std::vector<PrismChoice>> parse_prism_transitions(const fs::path& base) {
  std::istringstream in(read_text(base.string() + ".tra"));
  std::size_t S = 0, C = 0, T = 0;
  if (!(in >> S >> C >> T)) throw Error(ErrorKind::io, "missing .tra header");
  std::vector<std::vector<PrismChoice>> out(S);
  std::string line;
  std::getline(in, line);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t src = 0, choice = 0, dst = 0;
    std::string interval, label;
    if (!(ls >> src >> choice >> dst >> interval >> label) || interval.size() < 5 || interval.front() != '[' ||
        interval.back() != ']' || src >= S) {
      throw Error(ErrorKind::io, "bad transition line '" + line + "'");
    }
    const auto comma = interval.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::io, "bad interval '" + interval + "'");
    const ProbInterval p{parse_double(std::string_view(interval).substr(1, comma - 1)),
                         parse_double(std::string_view(interval).substr(comma + 1, interval.size() - comma - 2))};
    auto& list = out[src];
    if (choice == list.size()) list.push_back({label, {}});
    if (choice + 1 != list.size()) throw Error(ErrorKind::io, "choices out of order in '" + line + "'");
    auto& row = list.back().row;
    if (dst == PartitionGrid::kAbsorbingState && label != "loop") {
      row.residual = p;
    } else {
      row.dest.push_back(static_cast<std::uint32_t>(dst));
      row.prob.push_back(p);
    }
    ++seen;
  }
  if (seen != T) throw Error(ErrorKind::io, "transition count differs from header");
  return out;
}

}  // namespace ddimdp
