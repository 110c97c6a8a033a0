#include "lsg/hplanner.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace lsg::hp
{

namespace
{

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

LayerStats & layer(PlanResult & r, LayerKind k)
{
  return r.layers.at(static_cast<std::size_t>(k));
}

const LevelNode & level_zero(const TargetNode & t)
{
  if (!t.level_graph || t.level_graph->children().empty()) {
    throw StructureError("inspected target " + to_string(t.id) + " has no levels");
  }
  return t.level_graph->children().front();
}

/// Nearest stored pose of a level to p; ties resolve to the smaller id.
const PoseNode * nearest_pose(const LevelNode & level, const Point3 & p)
{
  const PoseNode * best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  if (!level.pose_graph) {
    return nullptr;
  }
  for (const auto & pose : level.pose_graph->children()) {
    const double d = geometry::euclidean(pose.pose.position, p);
    if (d < best_d || (d == best_d && best && pose.id < best->id)) {
      best_d = d;
      best = &pose;
    }
  }
  return best;
}

class Planner
{
public:
  Planner(const Lsg & lsg, const Pose6 & robot, const PlannerOptions & options, PlanResult & out)
  : lsg_(lsg), options_(options), r_(out), pos_(robot.position)
  {
    r_.waypoints.push_back(pos_);
  }

  void start_at(const Localization & loc)
  {
    target_ = lsg_.find_target(loc.target);
    level_ = loc.level ? *loc.level : level_zero(*target_).id;
    at_ = loc.pose ? *loc.pose : level_;
    note_level_graph(*target_);
    leg_to(position_of_at());
  }

  void cross_to(const TargetNode & next)
  {
    exit_toward(next.est_position);
    const LevelNode & l0 = level_zero(next);
    leg_to(l0.position);
    target_ = &next;
    level_ = l0.id;
    at_ = l0.id;
    note_level_graph(next);
  }

  void exit_toward(const Point3 & p)
  {
    const LevelNode & l0 = level_zero(*target_);
    go_to_level(l0.id);
    r_.visited_graphs.insert({LayerKind::Pose, l0.id});
    if (const PoseNode * exit = nearest_pose(l0, p)) {
      pose_path(l0.id, exit->id);
    }
  }

  void go_to_level(NodeId level)
  {
    if (level_ == level) {
      return;
    }
    pose_path(level_, level_);
    level_path(level);
  }

  void pose_path(NodeId level, NodeId to)
  {
    if (at_ == to) {
      return;
    }
    const auto t0 = Clock::now();
    const LevelNode * l = lsg_.find_level(level);
    if (!l || !l->pose_graph) {
      throw StructureError("level " + to_string(level) + " has no pose graph");
    }
    const PlanningGraph g = planning_graph(*l->pose_graph);
    const PathResult p = dijkstra(g, at_, to);
    LayerStats & s = layer(r_, LayerKind::Pose);
    s.time_ms += elapsed_ms(t0);
    ++s.invocations;
    s.edges += g.size();
    s.nodes += g.order();
    s.length += p.length;
    r_.visited_graphs.insert({LayerKind::Pose, level});
    push_segment(LayerKind::Pose, level, g, p);
    at_ = to;
  }

  void level_path(NodeId to)
  {
    const auto t0 = Clock::now();
    PlanningGraph g = planning_graph(*target_->level_graph);
    g.forbid_transit(target_->id);
    const PathResult p = dijkstra(g, level_, to);
    LayerStats & s = layer(r_, LayerKind::Level);
    s.time_ms += elapsed_ms(t0);
    ++s.invocations;
    s.length += p.length;
    // each landmark's level graph is counted once, however often it is searched
    if (counted_.insert(target_->id).second) {
      s.edges += g.size();
      s.nodes += g.order();
    }
    r_.visited_graphs.insert({LayerKind::Level, target_->id});
    push_segment(LayerKind::Level, target_->id, g, p);
    level_ = to;
    at_ = to;
  }

  void leg_to(const Point3 & to)
  {
    if (geometry::euclidean(pos_, to) < 1e-9) {
      return;
    }
    Leg leg;
    leg.from = pos_;
    leg.to = to;
    const auto t0 = Clock::now();
    try {
      leg.path = options_.refine ? options_.refine(pos_, to) : std::vector<Point3>{pos_, to};
    } catch (const std::exception & e) {
      throw PlanningError(std::string("free-space leg cannot be refined: ") + e.what());
    }
    r_.leg_time_ms += elapsed_ms(t0);
    if (leg.path.size() < 2) {
      leg.path = {pos_, to};
    }
    leg.refined = leg.path.size() > 2;
    for (std::size_t i = 1; i < leg.path.size(); ++i) {
      leg.length += geometry::euclidean(leg.path[i - 1], leg.path[i]);
    }
    append(leg.path);
    r_.legs.push_back(std::move(leg));
  }

  const TargetNode & target() const {return *target_;}
  NodeId level() const {return level_;}
  const Point3 & position() const {return pos_;}

private:
  Point3 position_of_at() const
  {
    if (const PoseNode * p = lsg_.find_pose(at_)) {
      return p->pose.position;
    }
    return lsg_.find_level(at_)->position;
  }

  void note_level_graph(const TargetNode & t)
  {
    r_.visited_graphs.insert({LayerKind::Level, t.id});
  }

  void push_segment(LayerKind k, NodeId owner, const PlanningGraph & g, const PathResult & p)
  {
    LocalSegment seg{k, owner, p.nodes, {}, p.length};
    for (NodeId id : p.nodes) {
      seg.points.push_back(g.position(id));
    }
    append(seg.points);
    r_.segments.push_back(std::move(seg));
  }

  void append(const std::vector<Point3> & pts)
  {
    for (const auto & q : pts) {
      if (geometry::euclidean(r_.waypoints.back(), q) > 1e-9) {
        r_.total_length += geometry::euclidean(r_.waypoints.back(), q);
        r_.waypoints.push_back(q);
      }
    }
    pos_ = r_.waypoints.back();
  }

  const Lsg & lsg_;
  const PlannerOptions & options_;
  PlanResult & r_;
  Point3 pos_;
  const TargetNode * target_{nullptr};
  NodeId level_{};
  NodeId at_{};
  std::set<NodeId> counted_;
};

const TargetNode * nearest_inspected(const Lsg & lsg, const Point3 & p)
{
  const TargetNode * best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const TargetNode * t : lsg.inspected()) {
    const double d = geometry::planar_distance(t->est_position.xy(), p.xy());
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  return best;
}

}  // namespace

void validate(const TerminalSpec & t)
{
  if (t.pose && !t.level) {
    throw std::invalid_argument("terminal pose requires a terminal level");
  }
  if (t.level && t.target == kRobotId) {
    throw std::invalid_argument("the robot node has no levels");
  }
}

double PlanResult::plan_time_ms() const
{
  double t = 0.0;
  for (const auto & s : layers) {
    t += s.time_ms;
  }
  return t;
}

Localization localize(const Lsg & lsg, const Pose6 & robot)
{
  Localization loc;
  const auto done = lsg.inspected();
  if (done.empty()) {
    return loc;
  }
  const TargetNode * cur = nullptr;
  for (const TargetNode * t : done) {
    if (t->polygon && geometry::point_in_polygon(robot.position, *t->polygon)) {
      cur = t;
      loc.inside_polygon = true;
      break;
    }
  }
  if (!cur) {
    cur = nearest_inspected(lsg, robot.position);
  }
  loc.target = cur->id;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto & level : cur->level_graph->children()) {
    if (const PoseNode * p = nearest_pose(level, robot.position)) {
      const double d = geometry::euclidean(p->pose.position, robot.position);
      if (d < best_d || (d == best_d && p->id < *loc.pose)) {
        best_d = d;
        loc.level = level.id;
        loc.pose = p->id;
      }
    }
  }
  if (!loc.level) {
    loc.level = level_zero(*cur).id;
  }
  return loc;
}

PlanningGraph target_planning_graph(const Lsg & lsg)
{
  PlanningGraph g;
  g.add_node(kRobotId, lsg.base_pose().position);
  g.forbid_transit(kRobotId);
  for (const TargetNode * t : lsg.inspected()) {
    g.add_node(t->id, t->est_position);
  }
  for (const Edge & e : lsg.target_graph().edges()) {
    if (!g.contains(e.a) || !g.contains(e.b)) {
      continue;
    }
    const double w = e.attr.kind == EdgeKind::Weighted ?
      e.attr.weight : geometry::euclidean(g.position(e.a), g.position(e.b));
    g.add_edge(e.a, e.b, w);
  }
  return g;
}

PlanResult plan_hierarchical(const Lsg & lsg, const Pose6 & robot, const TerminalSpec & terminal,
  const PlannerOptions & options)
{
  validate(terminal);
  if (lsg.inspected().empty()) {
    throw PlanningError("no inspected targets to plan over");
  }
  PlanResult r;
  r.terminal = terminal;
  r.visited_graphs.insert({LayerKind::Target, kRobotId});

  enum class Mode { Base, Inspected, Detected } mode = Mode::Base;
  const TargetNode * goal = nullptr;
  NodeId dst = kRobotId;
  if (terminal.target != kRobotId) {
    goal = lsg.find_target(terminal.target);
    if (!goal) {
      throw PlanningError("unknown terminal target " + to_string(terminal.target));
    }
    if (goal->inspected()) {
      mode = Mode::Inspected;
      dst = goal->id;
      if (terminal.level && lsg.owner_of_level(*terminal.level) != goal) {
        throw PlanningError("terminal level does not belong to the terminal target");
      }
      if (terminal.pose) {
        const LevelNode * owner = lsg.owner_of_pose(*terminal.pose);
        if (!owner || owner->id != *terminal.level) {
          throw PlanningError("terminal pose does not belong to the terminal level");
        }
      }
    } else {
      if (terminal.level) {
        throw PlanningError("a Detected target has no levels");
      }
      mode = Mode::Detected;
      dst = nearest_inspected(lsg, goal->est_position)->id;
    }
  }

  const Localization loc = localize(lsg, robot);
  for (const auto & level : lsg.find_target(loc.target)->level_graph->children()) {
    if (level.pose_graph) {
      r.visited_graphs.insert({LayerKind::Pose, level.id});
    }
  }

  {
    const auto t0 = Clock::now();
    const PlanningGraph g = target_planning_graph(lsg);
    LayerStats & s = layer(r, LayerKind::Target);
    if (loc.target == dst) {
      r.landmark_route = {dst};
    } else {
      try {
        const PathResult p = dijkstra(g, loc.target, dst);
        r.landmark_route = p.nodes;
        s.length = p.length;
        s.edges = g.size();
        s.nodes = g.order();
        ++s.invocations;
      } catch (const NoPathError &) {
        throw PlanningError("no landmark route from target " + to_string(loc.target) +
                " to " + (dst == kRobotId ? std::string("base") : "target " + to_string(dst)) +
                ": traversal edges are missing on the Target layer");
      }
      s.time_ms = elapsed_ms(t0);
    }
  }

  Planner pl(lsg, robot, options, r);
  pl.start_at(loc);
  for (std::size_t i = 0; i + 1 < r.landmark_route.size(); ++i) {
    const NodeId next = r.landmark_route[i + 1];
    if (next == kRobotId) {
      pl.exit_toward(lsg.base_pose().position);
      pl.leg_to(lsg.base_pose().position);
    } else {
      pl.cross_to(*lsg.find_target(next));
    }
  }

  switch (mode) {
    case Mode::Base:
      break;
    case Mode::Inspected:
      if (terminal.level) {
        pl.go_to_level(*terminal.level);
        if (terminal.pose) {
          pl.pose_path(*terminal.level, *terminal.pose);
        }
      } else {
        pl.go_to_level(level_zero(*goal).id);
      }
      break;
    case Mode::Detected: {
        pl.exit_toward(goal->est_position);
        const Point3 c = goal->est_position;
        const Point3 & from = pl.position();
        const double d = geometry::planar_distance(from.xy(), c.xy());
        if (d > options.approach_distance) {
          const double k = options.approach_distance / d;
          pl.leg_to({c.x + k * (from.x - c.x), c.y + k * (from.y - c.y), from.z});
        }
        break;
      }
  }
  return r;
}

}  // namespace lsg::hp
