#include "lsg/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "lsg/export.hpp"
#include "lsg/graph_union.hpp"
#include "lsg/legs.hpp"
#include "lsg/query.hpp"
#include "lsg/serialize.hpp"
#include "lsg/vplanner.hpp"

namespace lsg::cli
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

/// Input problems map to exit code 2.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path & p, const std::string & text)
{
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw InputError("cannot write " + p.string());
  }
  out << text;
}

Lsg load_lsg(const fs::path & p)
{
  try {
    return deserialize(read_file(p));
  } catch (const DocumentError & e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

std::string layer_name(std::size_t i)
{
  return to_string(static_cast<LayerKind>(i));
}

const TargetNode * target_by_id(const Lsg & lsg, NodeId id)
{
  return lsg.find_target(id);
}

std::string landmark_name(const Lsg * lsg, NodeId id)
{
  if (id == kRobotId) {
    return "base";
  }
  if (lsg) {
    if (const TargetNode * t = target_by_id(*lsg, id)) {
      return t->inspected() ? t->label : t->display_name();
    }
  }
  return to_string(id);
}

std::string summarize(const Lsg * lsg, const std::string & query, const hp::PlanResult & plan,
  bool timing)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "query: " << query << "\n";
  os << "landmarks:";
  for (std::size_t i = 0; i < plan.landmark_route.size(); ++i) {
    os << (i ? " -> " : " ") << landmark_name(lsg, plan.landmark_route[i]);
  }
  os << "\n";
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const hp::LayerStats & s = plan.layers[i];
    os << "  " << std::left << std::setw(7) << layer_name(i) << std::right;
    if (s.invocations == 0) {
      os << "  Nil\n";
      continue;
    }
    os << "  time " << (timing ? s.time_ms : 0.0) << " ms  length " << s.length << " m";
    os << "  E/N " << s.edges << "/" << s.nodes << "  (" << s.invocations << " searches)\n";
  }
  double leg_len = 0.0;
  int refined = 0;
  for (const auto & l : plan.legs) {
    leg_len += l.length;
    refined += l.refined ? 1 : 0;
  }
  os << "  legs " << plan.legs.size() << " (" << leg_len << " m, " << refined << " refined)\n";
  os << "total: " << plan.total_length << " m\n";
  return os.str();
}

Pose6 random_pose_node(const Lsg & lsg, std::mt19937_64 & rng, hp::TerminalSpec * spec)
{
  const auto done = lsg.inspected();
  const TargetNode * t = done[rng() % done.size()];
  const auto & levels = t->level_graph->children();
  const LevelNode & l = levels[rng() % levels.size()];
  const auto & poses = l.pose_graph->children();
  const PoseNode & p = poses[rng() % poses.size()];
  if (spec) {
    *spec = {t->id, l.id, p.id};
  }
  return p.pose;
}

int cmd_run(const std::string & scenario_arg, const std::string & config_path,
  std::optional<std::uint64_t> seed, const fs::path & out_dir, bool timing, std::ostream & out)
{
  sim::Scenario scenario = sim::load_scenario(resolve_scenario_path(scenario_arg));
  if (seed) {
    scenario.seed = *seed;
  }
  const mission::MissionConfig cfg = config_path.empty() ?
    mission::MissionConfig{} : mission::load_config(config_path);
  mission::validate(cfg);
  const mission::MissionResult r = mission::run_mission(scenario, cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw InputError("cannot create output directory " + out_dir.string());
  }
  write_file(out_dir / "lsg.json", serialize(r.lsg));
  write_file(out_dir / "metrics.csv", metrics_csv(r.trace));
  write_file(out_dir / "events.log", events_log(r));
  json plans = json::array();
  for (const auto & p : r.plans) {
    json j = plan_to_json(p.plan, timing);
    j["query"] = p.query;
    j["t_sim_s"] = p.t;
    plans.push_back(std::move(j));
  }
  write_file(out_dir / "plans.json", json{{"format", "lsg-plans"}, {"version", 1},
      {"plans", plans}}.dump(1) + "\n");
  const json manifest{
    {"format", "lsg-run-manifest"}, {"version", 1},
    {"scenario", resolve_scenario_path(scenario_arg).string()},
    {"config", config_path}, {"seed", scenario.seed}, {"output_dir", out_dir.string()},
    {"artifacts", {"lsg.json", "metrics.csv", "events.log", "plans.json"}},
    {"final_phase", mission::to_string(r.final_phase)}, {"aborted", r.aborted},
    {"inspected", r.lsg.inspected().size()}, {"sim_time_s", r.sim_time}};
  write_file(out_dir / "manifest.json", manifest.dump(1) + "\n");

  out << "scenario " << scenario.name << ": " << r.lsg.inspected().size() << " inspected, "
      << r.lsg.detected().size() << " detected left, phase " << mission::to_string(r.final_phase)
      << ", " << std::fixed << std::setprecision(1) << r.sim_time << " s simulated\n";
  if (r.aborted) {
    out << "mission aborted: " << r.abort_reason << "\n";
    return kMissionAbort;
  }
  return kOk;
}

int answer(const Lsg & lsg, const std::string & text, const hp::PlannerOptions & opt,
  bool timing, std::ostream & out, std::ostream & err, json * collected)
{
  try {
    const hp::SemanticQuery q = hp::parse_query(text);
    const hp::TerminalSpec t = hp::resolve_query(lsg, q);
    const hp::PlanResult plan = hp::plan_hierarchical(lsg, lsg.robot_pose(), t, opt);
    out << summarize(&lsg, text, plan, timing);
    if (collected) {
      json j = plan_to_json(plan, timing);
      j["query"] = text;
      collected->push_back(std::move(j));
    }
    return kOk;
  } catch (const hp::QueryParseError & e) {
    err << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const hp::ResolutionError & e) {
    err << "resolution error: " << e.what() << "\n";
    return kInputError;
  } catch (const hp::PlanningError & e) {
    err << "planning error: " << e.what() << "\n";
    return kPlanningFailure;
  }
}

int cmd_query(const fs::path & lsg_path, const std::string & text, bool interactive,
  const std::string & scenario_arg, const std::string & json_out, bool timing,
  std::istream & in, std::ostream & out, std::ostream & err)
{
  const Lsg lsg = load_lsg(lsg_path);
  std::optional<sim::World> world;
  std::optional<vp::OccupancyGrid> grid;
  hp::PlannerOptions opt;
  if (!scenario_arg.empty()) {
    world.emplace(sim::load_scenario(resolve_scenario_path(scenario_arg)));
    grid = vp::inflate_risk(vp::rasterize(*world));
    opt.refine = hp::world_refiner(*world, *grid);
  }
  json collected = json::array();
  json * sink = json_out.empty() ? nullptr : &collected;
  int code = kOk;
  if (interactive) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        out << "usage: Visit <feature> in <level> of <target> | Visit <level> of <target> | "
          "Visit <target> | Return to Base\n";
        continue;
      }
      answer(lsg, line, opt, timing, out, err, sink);
    }
  } else {
    if (text.empty()) {
      throw InputError("query text required (--q) unless --interactive is given");
    }
    code = answer(lsg, text, opt, timing, out, err, sink);
  }
  if (sink) {
    write_file(json_out, json{{"format", "lsg-plans"}, {"version", 1}, {"plans", collected}}.dump(1) +
      "\n");
  }
  return code;
}

int cmd_compare(const std::string & scenario_arg, const std::string & config_path, int n,
  std::uint64_t seed, const std::string & csv_out, bool timing, std::ostream & out,
  std::ostream & err)
{
  if (n < 0) {
    throw InputError("--n must be non-negative");
  }
  const sim::Scenario scenario = sim::load_scenario(resolve_scenario_path(scenario_arg));
  const mission::MissionConfig cfg = config_path.empty() ?
    mission::MissionConfig{} : mission::load_config(config_path);
  const mission::MissionResult m = mission::run_mission(scenario, cfg);
  if (m.aborted) {
    out << "mission aborted: " << m.abort_reason << "\n";
    return kMissionAbort;
  }
  const CompareResult r = compare_planners(scenario, cfg, m, n, seed);
  const std::string csv = compare_csv(r, timing);
  if (csv_out.empty()) {
    out << csv;
  } else {
    write_file(csv_out, csv);
  }
  if (r.skipped > 0) {
    err << "skipped " << r.skipped << " unreachable queries\n";
  }
  return kOk;
}

int cmd_export(const fs::path & lsg_path, const std::string & format, const std::string & dest,
  std::ostream & out)
{
  const Lsg lsg = load_lsg(lsg_path);
  const FlatGraph g = graph_union(lsg);
  std::ostringstream os;
  if (format == "dot") {
    write_dot(os, g);
  } else if (format == "graphml") {
    write_graphml(os, g);
  } else if (format == "union-json") {
    os << union_to_json(g).dump(1) << "\n";
  } else {
    throw InputError("unknown export format '" + format + "' (dot, graphml, union-json)");
  }
  if (dest.empty()) {
    out << os.str();
  } else {
    write_file(dest, os.str());
  }
  return kOk;
}

}  // namespace

fs::path resolve_scenario_path(const std::string & name_or_path)
{
  const fs::path p(name_or_path);
  if (fs::exists(p)) {
    return p;
  }
  const fs::path bundled = fs::path(LSG_DATA_DIR) / "scenarios" / (name_or_path + ".json");
  if (fs::exists(bundled)) {
    return bundled;
  }
  throw sim::ScenarioError("no scenario file or bundled scenario named '" + name_or_path + "'");
}

std::string metrics_csv(const std::vector<mission::MetricsSample> & trace)
{
  std::ostringstream os;
  os << "t_sim_s,layer,cum_order,cum_size\n";
  os << std::fixed << std::setprecision(3);
  for (const auto & s : trace) {
    for (std::size_t i = 0; i < kLayerCount; ++i) {
      os << s.t << "," << layer_name(i) << "," << s.metrics[i].order << "," << s.metrics[i].size <<
        "\n";
    }
  }
  return os.str();
}

std::string events_log(const mission::MissionResult & r)
{
  std::ostringstream os;
  for (const auto & e : r.log) {
    json j{{"t", e.t}, {"phase", mission::to_string(e.phase)}, {"event", e.kind}};
    if (!e.detail.is_null()) {
      j["detail"] = e.detail;
    }
    os << j.dump() << "\n";
  }
  return os.str();
}

json plan_to_json(const hp::PlanResult & plan, bool timing)
{
  json route = json::array();
  for (NodeId id : plan.landmark_route) {
    route.push_back(raw(id));
  }
  json segments = json::array();
  for (const auto & s : plan.segments) {
    json nodes = json::array();
    for (NodeId id : s.nodes) {
      nodes.push_back(raw(id));
    }
    segments.push_back({{"layer", to_string(s.layer)}, {"owner", raw(s.owner)},
        {"nodes", nodes}, {"length_m", s.length}});
  }
  json legs = json::array();
  for (const auto & l : plan.legs) {
    json path = json::array();
    for (const auto & p : l.path) {
      path.push_back(point_to_json(p));
    }
    legs.push_back({{"path", path}, {"length_m", l.length}, {"refined", l.refined}});
  }
  json layers = json::object();
  for (std::size_t i = 0; i < plan.layers.size(); ++i) {
    const auto & s = plan.layers[i];
    layers[layer_name(i)] = {{"invocations", s.invocations},
      {"time_ms", timing ? s.time_ms : 0.0}, {"length_m", s.length},
      {"edges", s.edges}, {"nodes", s.nodes}};
  }
  json terminal{{"target", raw(plan.terminal.target)}};
  if (plan.terminal.level) {
    terminal["level"] = raw(*plan.terminal.level);
  }
  if (plan.terminal.pose) {
    terminal["pose"] = raw(*plan.terminal.pose);
  }
  return {{"terminal", terminal}, {"landmark_route", route}, {"segments", segments},
    {"legs", legs}, {"layers", layers}, {"total_length_m", plan.total_length},
    {"plan_time_ms", timing ? plan.plan_time_ms() : 0.0},
    {"leg_time_ms", timing ? plan.leg_time_ms : 0.0}};
}

std::string plan_summary(const std::string & query, const hp::PlanResult & plan, bool timing)
{
  return summarize(nullptr, query, plan, timing);
}

CompareResult compare_planners(const sim::Scenario & scenario, const mission::MissionConfig & config,
  const mission::MissionResult & mission, int n, std::uint64_t seed)
{
  CompareResult r;
  if (n <= 0 || mission.lsg.inspected().empty()) {
    r.skipped = std::max(n, 0);
    return r;
  }
  const sim::World world(scenario, config.sensor, config.speed);
  const vp::OccupancyGrid grid = vp::inflate_risk(vp::rasterize(world, config.cell_size),
      config.risk_factor, config.risk_multiplier);
  hp::PlannerOptions opt;
  opt.approach_distance = config.approach_distance;
  opt.refine = hp::world_refiner(world, grid);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    hp::TerminalSpec goal;
    const Pose6 start = random_pose_node(mission.lsg, rng, nullptr);
    const Pose6 end = random_pose_node(mission.lsg, rng, &goal);
    try {
      const hp::PlanResult h = hp::plan_hierarchical(mission.lsg, start, goal, opt);
      const vp::GridPlan v = vp::plan_grid(grid, start.position, end.position);
      r.rows.push_back({i, h.plan_time_ms(), v.time_ms, h.total_length, v.length,
          geometry::euclidean(start.position, end.position)});
    } catch (const hp::PlanningError &) {
      ++r.skipped;
    } catch (const vp::UnreachableError &) {
      ++r.skipped;
    }
  }
  return r;
}

std::string compare_csv(const CompareResult & r, bool timing)
{
  std::ostringstream os;
  os << "query_id,hp_time_ms,vp_time_ms,hp_len_m,vp_len_m\n";
  os << std::fixed << std::setprecision(4);
  for (const auto & row : r.rows) {
    os << row.id << "," << (timing ? row.hp_time_ms : 0.0) << ","
       << (timing ? row.vp_time_ms : 0.0) << "," << row.hp_len_m << "," << row.vp_len_m << "\n";
  }
  return os.str();
}

int run(const std::vector<std::string> & args, std::istream & in, std::ostream & out,
  std::ostream & err)
{
  CLI::App app{"Layered semantic graph missions, queries and exports", "lsg"};
  app.require_subcommand(1);

  std::string scenario;
  std::string config;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool no_timing = false;
  auto * run_cmd = app.add_subcommand("run", "Run a full mission and write its artifacts");
  run_cmd->add_option("--scenario", scenario, "Scenario file or bundled name")->required();
  run_cmd->add_option("--config", config, "Mission config file");
  auto * seed_opt = run_cmd->add_option("--seed", seed, "Overrides the scenario seed");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--no-timing", no_timing, "Zero wall-clock timing fields");

  std::string lsg_path;
  std::string text;
  std::string json_out;
  std::string query_scenario;
  bool interactive = false;
  auto * query_cmd = app.add_subcommand("query", "Answer semantic navigation queries");
  query_cmd->add_option("--lsg", lsg_path, "LSG document")->required()->check(CLI::ExistingFile);
  auto * q_opt = query_cmd->add_option("--q", text, "Query text");
  query_cmd->add_flag("--interactive", interactive, "Read queries from stdin")->excludes(q_opt);
  query_cmd->add_option("--scenario", query_scenario, "Refine free-space legs against this world");
  query_cmd->add_option("--json", json_out, "Write plan documents here");
  query_cmd->add_flag("--no-timing", no_timing, "Zero wall-clock timing fields");

  int n = 20;
  std::string csv_out;
  std::string cmp_scenario;
  std::string cmp_config;
  std::uint64_t cmp_seed = 0;
  auto * cmp_cmd = app.add_subcommand("compare", "Hierarchical versus grid planning study");
  cmp_cmd->add_option("--scenario", cmp_scenario, "Scenario file or bundled name")->required();
  cmp_cmd->add_option("--config", cmp_config, "Mission config file");
  cmp_cmd->add_option("--n", n, "Number of random queries");
  cmp_cmd->add_option("--seed", cmp_seed, "Query sampling seed");
  cmp_cmd->add_option("--out", csv_out, "CSV destination (stdout when omitted)");
  cmp_cmd->add_flag("--no-timing", no_timing, "Zero wall-clock timing fields");

  std::string exp_lsg;
  std::string format = "dot";
  std::string exp_out;
  auto * exp_cmd = app.add_subcommand("export", "Export the merged graph");
  exp_cmd->add_option("--lsg", exp_lsg, "LSG document")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--format", format, "dot, graphml or union-json");
  exp_cmd->add_option("--out", exp_out, "Destination file (stdout when omitted)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError & e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return kInputError;
  }

  try {
    if (*run_cmd) {
      return cmd_run(scenario, config,
          seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          out_dir, !no_timing, out);
    }
    if (*query_cmd) {
      return cmd_query(lsg_path, text, interactive, query_scenario, json_out, !no_timing, in, out,
          err);
    }
    if (*cmp_cmd) {
      return cmd_compare(cmp_scenario, cmp_config, n, cmp_seed, csv_out, !no_timing, out, err);
    }
    return cmd_export(exp_lsg, format, exp_out, out);
  } catch (const InputError & e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const sim::ScenarioError & e) {
    err << "scenario error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument & e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const hp::PlanningError & e) {
    err << "planning error: " << e.what() << "\n";
    return kPlanningFailure;
  }
}

}  // namespace lsg::cli
