#include "lsg/mission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "lsg/legs.hpp"
#include "lsg/vplanner.hpp"

namespace lsg::mission
{

using nlohmann::json;
using geometry::Vec2;

namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

double heading(const Point3 & from, const Point3 & to, double fallback)
{
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  return std::hypot(dx, dy) < 1e-9 ? fallback : std::atan2(dy, dx);
}

/// Yaw looking from p toward the nearest point of the footprint.
double facing_yaw(const Vec2 & p, const Polygon2 & footprint)
{
  const Vec2 q = geometry::closest_boundary_point(p, footprint);
  return std::atan2(q.y - p.y, q.x - p.x);
}

class Runner
{
public:
  Runner(const sim::Scenario & scenario, const MissionConfig & config)
  : cfg_(config),
    world_(scenario, config.sensor, config.speed),
    grid_(vp::inflate_risk(vp::rasterize(world_, config.cell_size), config.risk_factor,
      config.risk_multiplier))
  {
    r_.lsg = Lsg(world_.robot_pose());
  }

  MissionResult run()
  {
    try {
      survey();
      while (static_cast<int>(r_.selections.size()) < cfg_.max_selections) {
        set_phase(MissionPhase::SelectTarget);
        const std::optional<NodeId> id = select();
        if (!id) {
          break;
        }
        visit(*id);
      }
      return_to_base();
      set_phase(MissionPhase::Done);
    } catch (const sim::CollisionError & e) {
      abort(e.what());
    } catch (const sim::OutOfBoundsError & e) {
      abort(e.what());
    } catch (const vp::UnreachableError & e) {
      abort(e.what());
    }
    sync();
    r_.final_phase = phase_;
    r_.sim_time = world_.clock();
    r_.final_pose = world_.robot_pose();
    return std::move(r_);
  }

private:
  void abort(const std::string & why)
  {
    r_.aborted = true;
    r_.abort_reason = why;
    event("abort", {{"reason", why}});
  }

  void set_phase(MissionPhase p)
  {
    phase_ = p;
    event("phase", {{"phase", to_string(p)}});
  }

  void sync()
  {
    r_.lsg.set_robot_pose(world_.robot_pose());
    r_.lsg.set_time(world_.clock());
  }

  void sample(bool prune = false)
  {
    sync();
    r_.trace.push_back({world_.clock(), phase_, r_.lsg.layer_metrics(), prune});
  }

  void event(const std::string & kind, json detail)
  {
    r_.log.push_back({world_.clock(), phase_, kind, std::move(detail)});
  }

  void sense_and_register(const Pose6 & pose)
  {
    const auto seen = world_.sense(pose);
    sync();
    for (const auto & s : seen) {
      const NodeId id = r_.lsg.register_detected(s.detection, s.est_position);
      event("registered", {{"target", raw(id)}, {"class", s.detection.class_label},
          {"confidence", s.detection.confidence}});
    }
    if (!seen.empty()) {
      sample();
    }
  }

  void prune()
  {
    sync();
    const auto removed = r_.lsg.prune_targets(cfg_.d_valid);
    json ids = json::array();
    for (NodeId id : removed) {
      ids.push_back(raw(id));
    }
    event("pruned", {{"removed", ids}});
    sample(true);
  }

  void survey()
  {
    set_phase(MissionPhase::Survey360);
    sample();
    const Pose6 start = world_.robot_pose();
    for (int k = 0; k < cfg_.survey_steps; ++k) {
      const Pose6 pose = geometry::make_pose(start.position,
          start.yaw + 2.0 * std::numbers::pi * k / cfg_.survey_steps);
      world_.step_to(pose);
      sense_and_register(pose);
    }
    prune();
  }

  std::optional<NodeId> select()
  {
    sync();
    const Pose6 & robot = world_.robot_pose();
    const auto detected = r_.lsg.detected();
    for (const TargetNode * t : detected) {
      if (!r_.skipped.count(t->id)) {
        r_.lsg.set_utility(t->id, utility(*t, robot, r_.lsg.detected(), cfg_.weights));
      }
    }
    const std::optional<NodeId> id = select_target(r_.lsg, robot, cfg_.weights, r_.skipped);
    if (id) {
      SelectionRecord rec{robot, {}, r_.skipped, *id};
      for (const TargetNode * t : r_.lsg.detected()) {
        rec.detected.push_back(*t);
      }
      r_.selections.push_back(std::move(rec));
      event("selected", {{"target", raw(*id)}, {"utility", *r_.lsg.find_target(*id)->utility}});
    }
    return id;
  }

  void skip(NodeId id, const std::string & why)
  {
    r_.skipped.insert(id);
    event("skipped", {{"target", raw(id)}, {"reason", why}});
  }

  void visit(NodeId id)
  {
    const TargetNode & t = *r_.lsg.find_target(id);
    const std::size_t idx = world_.nearest_target(t.est_position);
    if (inspected_world_.count(idx)) {
      skip(id, "duplicate of an inspected target");
      return;
    }
    set_phase(MissionPhase::NavigateToTarget);
    const sim::TargetSpec & spec = world_.scenario().targets[idx];
    navigate_hp(hp::TerminalSpec{id, std::nullopt, std::nullopt},
      "navigate " + t.display_name());
    const auto levels = plan_inspection(spec.footprint, spec.height,
        world_.robot_pose().position.xy(), cfg_);
    try {
      move_to(levels.front().front());
    } catch (const vp::UnreachableError & e) {
      skip(id, e.what());
      return;
    }
    set_phase(MissionPhase::Inspect);
    inspect(id, idx, levels);
    inspected_world_.insert(idx);
    set_phase(MissionPhase::LocalExplore);
    local_explore(idx);
  }

  /// Hierarchical navigation when possible; failures leave the robot in place.
  bool navigate_hp(const hp::TerminalSpec & terminal, const std::string & label)
  {
    sync();
    if (r_.lsg.inspected().empty()) {
      return false;
    }
    hp::PlannerOptions opt;
    opt.approach_distance = cfg_.approach_distance;
    opt.refine = hp::world_refiner(world_, grid_);
    hp::PlanResult plan;
    try {
      plan = hp::plan_hierarchical(r_.lsg, world_.robot_pose(), terminal, opt);
    } catch (const std::exception & e) {
      event("hp-fallback", {{"query", label}, {"reason", e.what()}});
      return false;
    }
    r_.plans.push_back({world_.clock(), label, plan});
    try {
      follow(plan.waypoints);
    } catch (const vp::UnreachableError & e) {
      event("hp-fallback", {{"query", label}, {"reason", e.what()}});
      return false;
    }
    return true;
  }

  void step(const Point3 & to, double yaw)
  {
    world_.step_to(geometry::make_pose(to, yaw));
  }

  void follow(const std::vector<Point3> & waypoints)
  {
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const Point3 from = world_.robot_pose().position;
      const Point3 & to = waypoints[i];
      if (world_.segment_clear(from, to)) {
        step(to, heading(from, to, world_.robot_pose().yaw));
        continue;
      }
      for (const Point3 & q : hp::refine_leg(world_, grid_, from, to)) {
        const Point3 cur = world_.robot_pose().position;
        step(q, heading(cur, q, world_.robot_pose().yaw));
      }
    }
  }

  /// Straight when clear, else along a grid path; throws vp::UnreachableError.
  void move_to(const Pose6 & goal)
  {
    const auto path = hp::refine_leg(world_, grid_, world_.robot_pose().position, goal.position);
    follow(path);
    world_.step_to(goal);
  }

  void inspect(NodeId id, std::size_t idx, const std::vector<std::vector<Pose6>> & levels)
  {
    r_.lsg.begin_inspection(id);
    std::vector<Point3> ground;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      std::vector<Pose6> poses;
      for (const Pose6 & p : levels[k]) {
        if (world_.in_bounds(p.position) && world_.point_free(p.position)) {
          poses.push_back(p);
        }
      }
      if (poses.empty()) {
        continue;
      }
      const Point3 a = poses.front().position;
      const Point3 b = poses.back().position;
      sync();
      const NodeId level = r_.lsg.add_level(id, geometry::lerp(a, b, 0.5));
      sample();
      for (std::size_t i = 0; i < poses.size(); ++i) {
        try {
          move_to(poses[i]);
        } catch (const vp::UnreachableError &) {
          event("pose-skipped", {{"target", raw(id)}, {"level", k}, {"index", i}});
          continue;
        }
        sync();
        const NodeId pose = r_.lsg.add_pose(level, poses[i],
            "insp-" + to_string(id) + "-" + std::to_string(k) + "-" + std::to_string(i));
        if (k == 0) {
          ground.push_back(poses[i].position);
        }
        for (const auto & f : world_.sense_features(poses[i], idx)) {
          r_.lsg.add_feature(pose, f);
        }
        sample();
      }
    }
    const TargetNode & t = r_.lsg.promote_to_inspected(id, geometry::convex_hull(ground));
    event("inspected", {{"target", raw(id)}, {"label", t.label}});
    sample();
  }

  void local_explore(std::size_t idx)
  {
    const sim::TargetSpec & spec = world_.scenario().targets[idx];
    const Polygon2 hull = geometry::convex_hull(spec.footprint.vertices());
    const geometry::OffsetRing ring(hull, cfg_.orbit_radius);
    const double s0 = ring.project(world_.robot_pose().position.xy());
    int visited = 0;
    for (int i = 0; i < cfg_.orbit_waypoints; ++i) {
      const Vec2 p = ring.at(s0 + ring.length() * i / cfg_.orbit_waypoints);
      const Vec2 q = geometry::closest_boundary_point(p, spec.footprint);
      const double out = std::atan2(p.y - q.y, p.x - q.x);
      const Point3 at{p.x, p.y, 0.0};
      if (!world_.in_bounds(at) || !world_.point_free(at)) {
        continue;
      }
      try {
        move_to(geometry::make_pose(at, out));
      } catch (const vp::UnreachableError &) {
        continue;
      }
      ++visited;
      for (double dyaw : {0.0, -0.5 * cfg_.sensor.fov, 0.5 * cfg_.sensor.fov}) {
        const Pose6 pose = geometry::make_pose(at, out + dyaw);
        world_.step_to(pose);
        sense_and_register(pose);
      }
    }
    if (visited == 0) {
      event("orbit-unreachable", {{"world_target", idx}});
    }
    prune();
    const auto added = r_.lsg.refresh_traversal_edges(
      [this](const Point3 & a, const Point3 & b) {return world_.obstacle_clear(a, b);},
      cfg_.traversal_margin);
    if (!added.empty()) {
      json edges = json::array();
      for (const Edge & e : added) {
        edges.push_back({raw(e.a), raw(e.b)});
      }
      event("traversal-edges", {{"added", edges}});
      sample();
    }
  }

  void return_to_base()
  {
    set_phase(MissionPhase::ReturnToBase);
    const Pose6 base = r_.lsg.base_pose();
    navigate_hp(hp::TerminalSpec{kRobotId, std::nullopt, std::nullopt}, "Return to Base");
    move_to(base);
  }

  MissionConfig cfg_;
  sim::World world_;
  vp::OccupancyGrid grid_;
  MissionResult r_;
  MissionPhase phase_{MissionPhase::Survey360};
  std::set<std::size_t> inspected_world_;
};

void require(bool ok, const char * field)
{
  if (!ok) {
    throw std::invalid_argument(std::string("mission config field '") + field + "' out of range");
  }
}

}  // namespace

void validate(const MissionConfig & c)
{
  require(c.weights.s_p > 0.0 && c.weights.s_a > 0.0 && c.weights.s_n > 0.0, "weights");
  require(c.d_valid > 0.0, "d_valid");
  require(c.survey_steps > 0, "survey_steps");
  require(c.standoff > 0.0, "standoff");
  require(c.orbit_radius > 0.0, "orbit_radius");
  require(c.orbit_waypoints > 0, "orbit_waypoints");
  require(c.level_step > 0.0, "level_step");
  require(c.pose_step > 0.0, "pose_step");
  require(c.max_poses_per_level >= 4, "max_poses_per_level");
  require(c.speed > 0.0, "speed");
  require(c.traversal_margin >= 0.0, "traversal_margin");
  require(c.approach_distance >= 0.0, "approach_distance");
  require(c.cell_size > 0.0, "cell_size");
  require(c.risk_factor >= 0, "risk_factor");
  require(c.risk_multiplier >= 1.0, "risk_multiplier");
  require(c.max_selections > 0, "max_selections");
  sim::validate(c.sensor);
}

MissionConfig config_from_json(const json & doc)
{
  MissionConfig c;
  if (!doc.is_object()) {
    throw std::invalid_argument("mission config must be a JSON object");
  }
  auto num = [](const json & obj, const std::string & key, auto & out) {
      if (!obj.contains(key)) {
        return;
      }
      const json & v = obj.at(key);
      if (!v.is_number()) {
        throw std::invalid_argument("mission config field '" + key + "' must be a number");
      }
      out = v.get<std::remove_reference_t<decltype(out)>>();
    };
  for (const auto & [key, value] : doc.items()) {
    static const std::set<std::string> known{"format", "version", "weights", "d_valid",
      "survey_steps", "standoff", "orbit_radius", "orbit_waypoints", "level_step", "pose_step",
      "max_poses_per_level", "speed", "traversal_margin", "approach_distance", "cell_size",
      "risk_factor", "risk_multiplier", "max_selections", "sensor"};
    if (!known.count(key)) {
      throw std::invalid_argument("unknown mission config field '" + key + "'");
    }
  }
  if (doc.contains("format") && doc.at("format") != "lsg-config") {
    throw std::invalid_argument("mission config field 'format' must be \"lsg-config\"");
  }
  if (doc.contains("version") && doc.at("version") != 1) {
    throw std::invalid_argument("mission config field 'version' is unsupported");
  }
  if (doc.contains("weights")) {
    const json & w = doc.at("weights");
    num(w, "s_p", c.weights.s_p);
    num(w, "s_a", c.weights.s_a);
    num(w, "s_n", c.weights.s_n);
  }
  num(doc, "d_valid", c.d_valid);
  num(doc, "survey_steps", c.survey_steps);
  num(doc, "standoff", c.standoff);
  num(doc, "orbit_radius", c.orbit_radius);
  num(doc, "orbit_waypoints", c.orbit_waypoints);
  num(doc, "level_step", c.level_step);
  num(doc, "pose_step", c.pose_step);
  num(doc, "max_poses_per_level", c.max_poses_per_level);
  num(doc, "speed", c.speed);
  num(doc, "traversal_margin", c.traversal_margin);
  num(doc, "approach_distance", c.approach_distance);
  num(doc, "cell_size", c.cell_size);
  num(doc, "risk_factor", c.risk_factor);
  num(doc, "risk_multiplier", c.risk_multiplier);
  num(doc, "max_selections", c.max_selections);
  if (doc.contains("sensor")) {
    const json & s = doc.at("sensor");
    double fov_deg = c.sensor.fov / kDeg;
    num(s, "fov_deg", fov_deg);
    c.sensor.fov = fov_deg * kDeg;
    num(s, "max_range", c.sensor.max_range);
    num(s, "image_w", c.sensor.image_w);
    num(s, "image_h", c.sensor.image_h);
    num(s, "mask_area_k", c.sensor.mask_area_k);
  }
  validate(c);
  return c;
}

json config_to_json(const MissionConfig & c)
{
  return {
    {"format", "lsg-config"}, {"version", 1},
    {"weights", {{"s_p", c.weights.s_p}, {"s_a", c.weights.s_a}, {"s_n", c.weights.s_n}}},
    {"d_valid", c.d_valid}, {"survey_steps", c.survey_steps}, {"standoff", c.standoff},
    {"orbit_radius", c.orbit_radius}, {"orbit_waypoints", c.orbit_waypoints},
    {"level_step", c.level_step}, {"pose_step", c.pose_step},
    {"max_poses_per_level", c.max_poses_per_level}, {"speed", c.speed},
    {"traversal_margin", c.traversal_margin}, {"approach_distance", c.approach_distance},
    {"cell_size", c.cell_size}, {"risk_factor", c.risk_factor},
    {"risk_multiplier", c.risk_multiplier}, {"max_selections", c.max_selections},
    {"sensor", {{"fov_deg", c.sensor.fov / kDeg}, {"max_range", c.sensor.max_range},
      {"image_w", c.sensor.image_w}, {"image_h", c.sensor.image_h},
      {"mask_area_k", c.sensor.mask_area_k}}}};
}

MissionConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path.string());
  }
  try {
    return config_from_json(json::parse(in));
  } catch (const json::exception & e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
}

std::string to_string(MissionPhase p)
{
  switch (p) {
    case MissionPhase::Survey360: return "Survey360";
    case MissionPhase::SelectTarget: return "SelectTarget";
    case MissionPhase::NavigateToTarget: return "NavigateToTarget";
    case MissionPhase::Inspect: return "Inspect";
    case MissionPhase::LocalExplore: return "LocalExplore";
    case MissionPhase::ReturnToBase: return "ReturnToBase";
    case MissionPhase::Done: return "Done";
  }
  return "?";
}

double utility(const TargetNode & node, const Pose6 & robot,
  const std::vector<const TargetNode *> & detected, const UtilityWeights & w)
{
  const double d = geometry::euclidean(robot.position, node.est_position);
  const double p = 1.0 / std::max(d, 0.1);
  const double a = node.detection.mask_area_px /
    (static_cast<double>(node.detection.image_w) * node.detection.image_h);
  double sum = 0.0;
  std::size_t others = 0;
  for (const TargetNode * o : detected) {
    if (o->id != node.id) {
      sum += geometry::euclidean(o->est_position, node.est_position);
      ++others;
    }
  }
  const double n = others == 0 ? 0.0 : 1.0 / std::max(sum / static_cast<double>(others), 0.1);
  return w.s_p * p + w.s_a * a + w.s_n * n;
}

std::optional<NodeId> select_target(const Lsg & lsg, const Pose6 & robot,
  const UtilityWeights & w, const std::set<NodeId> & skip)
{
  const auto detected = lsg.detected();
  std::optional<NodeId> best;
  double best_u = -std::numeric_limits<double>::infinity();
  for (const TargetNode * t : detected) {
    if (skip.count(t->id)) {
      continue;
    }
    const double u = utility(*t, robot, detected, w);
    if (u > best_u || (u == best_u && t->id < *best)) {
      best_u = u;
      best = t->id;
    }
  }
  return best;
}

std::vector<std::vector<Pose6>> plan_inspection(const Polygon2 & footprint, double height,
  const Vec2 & entry_hint, const MissionConfig & c)
{
  const Polygon2 hull = geometry::convex_hull(footprint.vertices());
  const geometry::OffsetRing ring(hull, c.standoff);
  const double s0 = ring.project(entry_hint);
  const double len = ring.length();
  const int n = std::max(4, static_cast<int>(std::lround(len / c.pose_step)));
  const double step = len / n;
  const int levels = std::max(1, static_cast<int>(std::ceil(height / c.level_step - 1e-9)));
  std::vector<std::vector<Pose6>> out(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double z = k * c.level_step;
    auto & poses = out[static_cast<std::size_t>(k)];
    for (int i = 0; i < c.max_poses_per_level; ++i) {
      const Vec2 p = ring.at(s0 + i * step);
      if (i > 0 && geometry::planar_distance(p, poses.front().position.xy()) < 0.5 * step) {
        break;   // wrapped around to the first view
      }
      poses.push_back(geometry::make_pose({p.x, p.y, z}, facing_yaw(p, footprint)));
    }
  }
  return out;
}

MissionResult run_mission(const sim::Scenario & scenario, const MissionConfig & config)
{
  validate(config);
  return Runner(scenario, config).run();
}

}  // namespace lsg::mission
