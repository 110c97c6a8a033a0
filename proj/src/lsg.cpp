#include "lsg/lsg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace lsg
{

namespace
{

// Edges may not carry a zero weight; coincident endpoints get this floor.
constexpr double kMinWeight = 1e-6;

EdgeAttr euclidean_edge(const Point3 & a, const Point3 & b)
{
  return EdgeAttr::weighted(std::max(geometry::euclidean(a, b), kMinWeight));
}

}  // namespace

std::string to_string(LayerKind layer)
{
  switch (layer) {
    case LayerKind::Target: return "Target";
    case LayerKind::Level: return "Level";
    case LayerKind::Pose: return "Pose";
    case LayerKind::Feature: return "Feature";
  }
  return "?";
}

LayerKind layer_from_string(const std::string & name)
{
  for (auto l : {LayerKind::Target, LayerKind::Level, LayerKind::Pose, LayerKind::Feature}) {
    if (to_string(l) == name) {
      return l;
    }
  }
  throw std::invalid_argument("unknown layer '" + name + "'");
}

std::string to_string(EventKind kind)
{
  switch (kind) {
    case EventKind::NodeAdded: return "node_added";
    case EventKind::EdgeAdded: return "edge_added";
    case EventKind::NodeRemoved: return "node_removed";
    case EventKind::EdgeRemoved: return "edge_removed";
    case EventKind::Promoted: return "promoted";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string & name)
{
  for (auto k : {EventKind::NodeAdded, EventKind::EdgeAdded, EventKind::NodeRemoved,
      EventKind::EdgeRemoved, EventKind::Promoted})
  {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw std::invalid_argument("unknown event kind '" + name + "'");
}

EdgeAttr EdgeAttr::weighted(double w)
{
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw StructureError("weighted edge requires a positive finite weight");
  }
  return {EdgeKind::Weighted, w};
}

void validate(const Detection & d)
{
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
    throw std::invalid_argument("detection confidence outside [0, 1]");
  }
  if (d.image_w <= 0 || d.image_h <= 0) {
    throw std::invalid_argument("detection image size must be positive");
  }
  const double frame = static_cast<double>(d.image_w) * d.image_h;
  if (!(d.mask_area_px >= 0.0 && d.mask_area_px <= frame)) {
    throw std::invalid_argument("detection mask area outside [0, image_w * image_h]");
  }
}

std::string TargetNode::display_name() const
{
  if (inspected()) {
    return "Target-I-" + label;
  }
  return "Target-D-" + detection.class_label + "-" + to_string(id);
}

Lsg::Lsg(const Pose6 & robot_pose)
: robot_pose_(robot_pose),
  base_pose_(robot_pose),
  targets_(ParentRef{kRobotId, robot_pose.position})
{
  if (!geometry::is_finite(robot_pose.position)) {
    throw std::invalid_argument("robot pose must be finite");
  }
}

Lsg Lsg::from_parts(
  Pose6 robot_pose, Pose6 base_pose, double clock, std::uint64_t last_id,
  TargetGraph targets, std::optional<PendingInspection> pending,
  std::vector<GraphEvent> events)
{
  Lsg g(base_pose);
  g.robot_pose_ = robot_pose;
  g.clock_ = clock;
  g.last_id_ = last_id;
  g.targets_ = std::move(targets);
  g.pending_ = std::move(pending);
  g.events_ = std::move(events);
  return g;
}

void Lsg::set_robot_pose(const Pose6 & pose)
{
  robot_pose_ = pose;
}

void Lsg::set_time(double t)
{
  if (t < clock_) {
    throw std::invalid_argument("graph clock cannot run backwards");
  }
  clock_ = t;
}

NodeId Lsg::next_id()
{
  return NodeId{++last_id_};
}

void Lsg::log(LayerKind layer, EventKind kind, NodeId a, NodeId b)
{
  events_.push_back({clock_, layer, kind, a, b});
}

const TargetNode * Lsg::find_target(NodeId id) const
{
  return targets_.find(id);
}

const LevelGraph * Lsg::level_graph_of(NodeId target) const
{
  if (pending_ && pending_->target == target && pending_->level_graph) {
    return &*pending_->level_graph;
  }
  const TargetNode * t = targets_.find(target);
  if (t && t->level_graph) {
    return &*t->level_graph;
  }
  return nullptr;
}

LevelGraph * Lsg::mutable_level_graph(NodeId target)
{
  return const_cast<LevelGraph *>(level_graph_of(target));
}

const TargetNode * Lsg::owner_of_level(NodeId level) const
{
  for (const auto & t : targets_.children()) {
    if (const LevelGraph * lg = level_graph_of(t.id); lg && lg->find(level)) {
      return &t;
    }
  }
  return nullptr;
}

const LevelNode * Lsg::find_level(NodeId id) const
{
  const TargetNode * t = owner_of_level(id);
  return t ? level_graph_of(t->id)->find(id) : nullptr;
}

LevelNode * Lsg::mutable_level(NodeId level)
{
  return const_cast<LevelNode *>(find_level(level));
}

const LevelNode * Lsg::owner_of_pose(NodeId pose) const
{
  for (const auto & t : targets_.children()) {
    const LevelGraph * lg = level_graph_of(t.id);
    if (!lg) {
      continue;
    }
    for (const auto & l : lg->children()) {
      if (l.pose_graph && l.pose_graph->find(pose)) {
        return &l;
      }
    }
  }
  return nullptr;
}

const PoseNode * Lsg::find_pose(NodeId id) const
{
  const LevelNode * l = owner_of_pose(id);
  return l ? l->pose_graph->find(id) : nullptr;
}

PoseNode * Lsg::mutable_pose(NodeId pose, LevelNode ** owner)
{
  LevelNode * l = const_cast<LevelNode *>(owner_of_pose(pose));
  if (!l) {
    return nullptr;
  }
  if (owner) {
    *owner = l;
  }
  return l->pose_graph->find(pose);
}

std::vector<const TargetNode *> Lsg::detected() const
{
  std::vector<const TargetNode *> out;
  for (const auto & t : targets_.children()) {
    if (!t.inspected()) {
      out.push_back(&t);
    }
  }
  return out;
}

std::vector<const TargetNode *> Lsg::inspected() const
{
  std::vector<const TargetNode *> out;
  for (const auto & t : targets_.children()) {
    if (t.inspected()) {
      out.push_back(&t);
    }
  }
  return out;
}

NodeId Lsg::register_detected(const Detection & detection, const Point3 & est_position)
{
  validate(detection);
  if (!geometry::is_finite(est_position)) {
    throw std::invalid_argument("estimated position must be finite");
  }
  TargetNode node;
  node.id = next_id();
  node.detection = detection;
  node.est_position = est_position;
  targets_.add_child(std::move(node));
  const NodeId id{last_id_};
  targets_.add_edge(kRobotId, id, EdgeAttr::symbolic());
  log(LayerKind::Target, EventKind::NodeAdded, id);
  log(LayerKind::Target, EventKind::EdgeAdded, kRobotId, id);
  return id;
}

std::vector<NodeId> Lsg::prune_targets(double d_valid)
{
  std::vector<NodeId> removed;
  auto remove = [&](NodeId id) {
      for (const auto & e : targets_.remove_child(id)) {
        log(LayerKind::Target, EventKind::EdgeRemoved, e.a, e.b);
      }
      log(LayerKind::Target, EventKind::NodeRemoved, id);
      removed.push_back(id);
      if (pending_ && pending_->target == id) {
        pending_.reset();
      }
    };

  std::vector<NodeId> candidates;
  for (const auto & t : targets_.children()) {
    if (!t.inspected()) {
      candidates.push_back(t.id);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<Polygon2> polys;
  for (const auto * t : inspected()) {
    polys.push_back(*t->polygon);
  }
  std::vector<NodeId> survivors;
  for (NodeId id : candidates) {
    const Point3 p = targets_.find(id)->est_position;
    const bool covered = std::any_of(polys.begin(), polys.end(),
        [&](const Polygon2 & poly) {return geometry::point_in_polygon(p, poly);});
    if (covered) {
      remove(id);
    } else {
      survivors.push_back(id);
    }
  }

  std::set<NodeId> dead;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (dead.count(survivors[i])) {
      continue;
    }
    for (std::size_t j = i + 1; j < survivors.size(); ++j) {
      if (dead.count(survivors[j])) {
        continue;
      }
      const TargetNode & a = *targets_.find(survivors[i]);
      const TargetNode & b = *targets_.find(survivors[j]);
      if (geometry::euclidean(a.est_position, b.est_position) > d_valid) {
        continue;
      }
      const auto ka = std::tuple{a.detection.confidence, a.detection.mask_area_px};
      const auto kb = std::tuple{b.detection.confidence, b.detection.mask_area_px};
      // b has the larger id, so it loses ties.
      const NodeId a_id = a.id;
      const NodeId loser = ka < kb ? a_id : b.id;
      dead.insert(loser);
      remove(loser);
      if (loser == a_id) {
        break;
      }
    }
  }
  return removed;
}

void Lsg::set_utility(NodeId target, double u)
{
  TargetNode * t = targets_.find(target);
  if (!t) {
    throw StructureError("unknown target " + to_string(target));
  }
  t->utility = u;
}

void Lsg::begin_inspection(NodeId target)
{
  const TargetNode * t = targets_.find(target);
  if (!t) {
    throw StructureError("unknown target " + to_string(target));
  }
  if (t->inspected()) {
    throw StructureError("target " + to_string(target) + " is already inspected");
  }
  if (pending_ && pending_->target != target) {
    throw StructureError("another inspection is in progress");
  }
  if (!pending_) {
    pending_ = PendingInspection{target, std::nullopt};
  }
}

NodeId Lsg::add_level(NodeId target, const Point3 & position)
{
  const TargetNode * t = targets_.find(target);
  if (!t) {
    throw StructureError("unknown target " + to_string(target));
  }
  std::optional<LevelGraph> * slot = nullptr;
  if (pending_ && pending_->target == target) {
    slot = &pending_->level_graph;
  } else if (t->inspected()) {
    slot = &targets_.find(target)->level_graph;
  } else {
    throw StructureError("target " + to_string(target) + " is not under inspection");
  }
  if (!*slot) {
    slot->emplace(ParentRef{target, t->est_position});
  }
  LevelGraph & lg = **slot;
  LevelNode node;
  node.id = next_id();
  node.index = static_cast<int>(lg.children().size());
  node.position = position;
  const NodeId id = node.id;
  lg.add_child(std::move(node));
  log(LayerKind::Level, EventKind::NodeAdded, id);
  lg.add_edge(target, id, EdgeAttr::symbolic());
  log(LayerKind::Level, EventKind::EdgeAdded, target, id);
  if (lg.children().size() > 1) {
    const LevelNode & prev = lg.children()[lg.children().size() - 2];
    lg.add_edge(prev.id, id, euclidean_edge(prev.position, position));
    log(LayerKind::Level, EventKind::EdgeAdded, prev.id, id);
  }
  return id;
}

NodeId Lsg::add_pose(NodeId level, const Pose6 & pose, const std::string & image_ref)
{
  LevelNode * l = mutable_level(level);
  if (!l) {
    throw StructureError("unknown level " + to_string(level));
  }
  if (!geometry::is_finite(pose.position)) {
    throw std::invalid_argument("pose must be finite");
  }
  if (!l->pose_graph) {
    l->pose_graph.emplace(ParentRef{l->id, l->position});
  }
  PoseGraph & pg = *l->pose_graph;
  PoseNode node;
  node.id = next_id();
  node.pose = pose;
  node.image_ref = image_ref;
  const NodeId id = node.id;
  const NodeId first = pg.children().empty() ? id : pg.children().front().id;
  const bool opening = pg.children().empty();
  const NodeId prev = opening ? id : pg.children().back().id;
  pg.add_child(std::move(node));
  log(LayerKind::Pose, EventKind::NodeAdded, id);

  if (opening) {
    pg.add_edge(l->id, id, euclidean_edge(l->position, pose.position));
    log(LayerKind::Pose, EventKind::EdgeAdded, l->id, id);
    return id;
  }
  const Point3 prev_pos = *pg.position_of(prev);
  pg.add_edge(prev, id, euclidean_edge(prev_pos, pose.position));
  log(LayerKind::Pose, EventKind::EdgeAdded, prev, id);
  // The parent keeps edges to the first and the current terminal pose only.
  if (prev != first && pg.remove_edge(l->id, prev)) {
    log(LayerKind::Pose, EventKind::EdgeRemoved, l->id, prev);
  }
  pg.add_edge(l->id, id, euclidean_edge(l->position, pose.position));
  log(LayerKind::Pose, EventKind::EdgeAdded, l->id, id);
  return id;
}

NodeId Lsg::add_feature(NodeId pose, const FeatureObservation & feature)
{
  LevelNode * level = nullptr;
  PoseNode * p = mutable_pose(pose, &level);
  if (!p) {
    throw StructureError("unknown pose " + to_string(pose));
  }
  if (!(feature.confidence >= 0.0 && feature.confidence <= 1.0) ||
    !(feature.mask_area_px >= 0.0))
  {
    throw std::invalid_argument("feature segmentation attributes out of range");
  }
  std::size_t same_class = 0;
  for (const auto & other : level->pose_graph->children()) {
    if (!other.feature_graph) {
      continue;
    }
    for (const auto & f : other.feature_graph->children()) {
      same_class += f.class_label == feature.class_label ? 1 : 0;
    }
  }
  if (!p->feature_graph) {
    p->feature_graph.emplace(ParentRef{p->id, p->pose.position});
  }
  FeatureNode node;
  node.id = next_id();
  node.class_label = feature.class_label;
  node.label = feature.class_label + "-" + std::to_string(same_class);
  node.position = feature.position;
  node.confidence = feature.confidence;
  node.mask_area_px = feature.mask_area_px;
  const NodeId id = node.id;
  p->feature_graph->add_child(std::move(node));
  log(LayerKind::Feature, EventKind::NodeAdded, id);
  p->feature_graph->add_edge(p->id, id, EdgeAttr::symbolic());
  log(LayerKind::Feature, EventKind::EdgeAdded, p->id, id);
  return id;
}

const TargetNode & Lsg::promote_to_inspected(NodeId id, Polygon2 polygon)
{
  if (!pending_ || pending_->target != id || !pending_->level_graph) {
    throw StructureError("target " + to_string(id) + " has no staged level graph");
  }
  LevelGraph lg = std::move(*pending_->level_graph);
  pending_.reset();
  TargetNode * t = targets_.find(id);
  if (!t || t->inspected()) {
    throw StructureError("target " + to_string(id) + " is not a Detected node");
  }
  std::size_t same_class = 0;
  for (const auto * other : inspected()) {
    same_class += other->detection.class_label == t->detection.class_label ? 1 : 0;
  }
  t->state = TargetState::Inspected;
  t->polygon = std::move(polygon);
  t->level_graph = std::move(lg);
  t->label = t->detection.class_label + "-" + std::to_string(same_class);
  log(LayerKind::Target, EventKind::Promoted, id);
  return *t;
}

namespace
{

std::uint64_t max_id(const LevelGraph & lg)
{
  std::uint64_t m = 0;
  for (const auto & l : lg.children()) {
    m = std::max(m, raw(l.id));
    if (!l.pose_graph) {
      continue;
    }
    for (const auto & p : l.pose_graph->children()) {
      m = std::max(m, raw(p.id));
      if (!p.feature_graph) {
        continue;
      }
      for (const auto & f : p.feature_graph->children()) {
        m = std::max(m, raw(f.id));
      }
    }
  }
  return m;
}

}  // namespace

const TargetNode & Lsg::promote_to_inspected(NodeId id, Polygon2 polygon, LevelGraph level_graph)
{
  const TargetNode * t = targets_.find(id);
  if (!t) {
    throw StructureError("unknown target " + to_string(id));
  }
  if (t->inspected()) {
    throw StructureError("target " + to_string(id) + " is already inspected");
  }
  if (level_graph.parent().id != id || level_graph.children().empty()) {
    throw StructureError("level graph must be parented by the promoted target and non-empty");
  }
  if (pending_ && pending_->target == id) {
    throw StructureError("target " + to_string(id) + " already has a staged level graph");
  }
  last_id_ = std::max(last_id_, max_id(level_graph));
  pending_ = PendingInspection{id, std::move(level_graph)};
  return promote_to_inspected(id, std::move(polygon));
}

std::vector<Edge> Lsg::refresh_traversal_edges(const VisibilityFn & visible, double margin)
{
  std::vector<Edge> added;
  const auto done = inspected();
  for (const TargetNode * cur : done) {
    for (const TargetNode * other : done) {
      if (cur == other || targets_.has_edge(cur->id, other->id)) {
        continue;
      }
      if (!geometry::point_in_dilated_polygon(other->est_position.xy(), *cur->polygon, margin)) {
        continue;
      }
      if (visible && !visible(cur->est_position, other->est_position)) {
        continue;
      }
      const EdgeAttr attr = euclidean_edge(cur->est_position, other->est_position);
      targets_.add_edge(cur->id, other->id, attr);
      log(LayerKind::Target, EventKind::EdgeAdded, cur->id, other->id);
      added.push_back({cur->id, other->id, attr});
    }
  }
  return added;
}

LayerMetrics Lsg::layer_metrics() const
{
  LayerMetrics m{};
  auto add = [&m](LayerKind k, std::size_t order, std::size_t size) {
      m[static_cast<std::size_t>(k)].order += order;
      m[static_cast<std::size_t>(k)].size += size;
    };
  add(LayerKind::Target, targets_.order(), targets_.size());
  for (const auto & t : targets_.children()) {
    const LevelGraph * lg = level_graph_of(t.id);
    if (!lg) {
      continue;
    }
    add(LayerKind::Level, lg->order(), lg->size());
    for (const auto & l : lg->children()) {
      if (!l.pose_graph) {
        continue;
      }
      add(LayerKind::Pose, l.pose_graph->order(), l.pose_graph->size());
      for (const auto & p : l.pose_graph->children()) {
        if (p.feature_graph) {
          add(LayerKind::Feature, p.feature_graph->order(), p.feature_graph->size());
        }
      }
    }
  }
  return m;
}

std::size_t Lsg::parent_copy_count() const
{
  std::size_t n = 0;
  for (const auto & t : targets_.children()) {
    const LevelGraph * lg = level_graph_of(t.id);
    if (!lg) {
      continue;
    }
    ++n;
    for (const auto & l : lg->children()) {
      if (!l.pose_graph) {
        continue;
      }
      ++n;
      for (const auto & p : l.pose_graph->children()) {
        n += p.feature_graph ? 1 : 0;
      }
    }
  }
  return n;
}

namespace
{

template<typename Node>
std::string check_graph(const LocalGraph<Node> & g, const ParentRef & expected_parent,
  std::set<NodeId> & seen)
{
  if (g.parent() != expected_parent) {
    return "parent copy of " + to_string(expected_parent.id) + " does not match original";
  }
  for (const auto & n : g.children()) {
    if (!seen.insert(n.id).second) {
      return "duplicate node id " + to_string(n.id);
    }
  }
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge & e = g.edges()[i];
    if (e.a == e.b) {
      return "self-loop on " + to_string(e.a);
    }
    if (!g.contains(e.a) || !g.contains(e.b)) {
      return "edge " + to_string(e.a) + "-" + to_string(e.b) + " leaves its local graph";
    }
    if (e.attr.kind == EdgeKind::Weighted && !(e.attr.weight > 0.0)) {
      return "non-positive edge weight";
    }
    for (std::size_t j = i + 1; j < g.edges().size(); ++j) {
      if (g.edges()[j].joins(e.a, e.b)) {
        return "duplicate edge " + to_string(e.a) + "-" + to_string(e.b);
      }
    }
  }
  return {};
}

std::string check_level_graph(const LevelGraph & lg, const ParentRef & parent,
  std::set<NodeId> & seen)
{
  if (auto err = check_graph(lg, parent, seen); !err.empty()) {
    return err;
  }
  for (std::size_t i = 0; i < lg.children().size(); ++i) {
    const LevelNode & l = lg.children()[i];
    if (l.index != static_cast<int>(i)) {
      return "level indices are not consecutive from 0";
    }
    if (l.pose_graph) {
      if (auto err = check_graph(*l.pose_graph, ParentRef{l.id, l.position}, seen);
        !err.empty())
      {
        return err;
      }
      for (const auto & p : l.pose_graph->children()) {
        if (!geometry::is_finite(p.pose.position)) {
          return "pose " + to_string(p.id) + " is not finite";
        }
        if (p.feature_graph) {
          if (auto err = check_graph(*p.feature_graph, ParentRef{p.id, p.pose.position}, seen);
            !err.empty())
          {
            return err;
          }
        }
      }
    }
  }
  return {};
}

}  // namespace

std::string check_invariants(const Lsg & lsg)
{
  std::set<NodeId> seen{kRobotId};
  const TargetGraph & tg = lsg.target_graph();
  if (tg.parent().id != kRobotId) {
    return "target graph parent is not the robot node";
  }
  if (auto err = check_graph(tg, tg.parent(), seen); !err.empty()) {
    return err;
  }
  for (const auto & t : tg.children()) {
    if (t.inspected()) {
      if (!t.polygon || !t.level_graph) {
        return "inspected target " + to_string(t.id) + " lacks polygon or level graph";
      }
      if (t.level_graph->children().empty()) {
        return "inspected target " + to_string(t.id) + " has no levels";
      }
    } else if (t.polygon || t.level_graph) {
      return "detected target " + to_string(t.id) + " carries inspection attributes";
    }
    if (t.level_graph) {
      if (auto err = check_level_graph(*t.level_graph, ParentRef{t.id, t.est_position}, seen);
        !err.empty())
      {
        return err;
      }
    }
  }
  if (const auto & p = lsg.pending(); p && p->level_graph) {
    const TargetNode * t = lsg.find_target(p->target);
    if (!t) {
      return "pending inspection references unknown target";
    }
    if (auto err = check_level_graph(*p->level_graph, ParentRef{t->id, t->est_position}, seen);
      !err.empty())
    {
      return err;
    }
  }
  for (NodeId id : seen) {
    if (raw(id) > lsg.last_id()) {
      return "node id " + to_string(id) + " exceeds the id counter";
    }
  }
  const auto & ev = lsg.events();
  for (std::size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].t < ev[i - 1].t) {
      return "event log timestamps decrease at entry " + std::to_string(i);
    }
  }
  return {};
}

}  // namespace lsg
