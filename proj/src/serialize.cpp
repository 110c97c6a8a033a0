#include "lsg/serialize.hpp"

#include <cmath>

namespace lsg
{

using nlohmann::json;

namespace
{

/// Cursor into a JSON tree that remembers its path for error messages.
class Reader
{
public:
  Reader(const json & node, std::string path)
  : node_(node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string & what) const
  {
    throw DocumentError("malformed document at " + (path_.empty() ? "/" : path_) + ": " + what);
  }

  bool has(const char * key) const
  {
    return node_.is_object() && node_.contains(key) && !node_.at(key).is_null();
  }

  Reader operator[](const char * key) const
  {
    if (!node_.is_object()) {
      fail("expected an object");
    }
    auto it = node_.find(key);
    if (it == node_.end()) {
      fail(std::string("missing field '") + key + "'");
    }
    return Reader(*it, path_ + "/" + key);
  }

  Reader operator[](std::size_t i) const
  {
    return Reader(node_.at(i), path_ + "/" + std::to_string(i));
  }

  std::size_t size() const
  {
    if (!node_.is_array()) {
      fail("expected an array");
    }
    return node_.size();
  }

  double number() const
  {
    if (!node_.is_number()) {
      fail("expected a number");
    }
    const double v = node_.get<double>();
    if (!std::isfinite(v)) {
      fail("number is not finite");
    }
    return v;
  }

  std::uint64_t unsigned_int() const
  {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return node_.get<std::uint64_t>();
  }

  int integer() const
  {
    if (!node_.is_number_integer()) {
      fail("expected an integer");
    }
    return node_.get<int>();
  }

  std::string string() const
  {
    if (!node_.is_string()) {
      fail("expected a string");
    }
    return node_.get<std::string>();
  }

  const json & raw() const {return node_;}

private:
  const json & node_;
  std::string path_;
};

json edge_to_json(const Edge & e)
{
  json j{{"a", raw(e.a)}, {"b", raw(e.b)}};
  if (e.attr.kind == EdgeKind::Weighted) {
    j["kind"] = "weighted";
    j["weight"] = e.attr.weight;
  } else {
    j["kind"] = "symbolic";
  }
  return j;
}

Edge edge_from(const Reader & r)
{
  Edge e;
  e.a = NodeId{r["a"].unsigned_int()};
  e.b = NodeId{r["b"].unsigned_int()};
  const std::string kind = r["kind"].string();
  if (kind == "weighted") {
    const double w = r["weight"].number();
    if (!(w > 0.0)) {
      r["weight"].fail("weighted edge needs a positive weight");
    }
    e.attr = {EdgeKind::Weighted, w};
  } else if (kind == "symbolic") {
    e.attr = EdgeAttr::symbolic();
  } else {
    r["kind"].fail("unknown edge kind '" + kind + "'");
  }
  return e;
}

Point3 point_from(const Reader & r)
{
  if (r.size() != 3) {
    r.fail("expected [x, y, z]");
  }
  return {r[std::size_t{0}].number(), r[std::size_t{1}].number(), r[std::size_t{2}].number()};
}

Pose6 pose_from(const Reader & r)
{
  return {point_from(r["position"]), r["yaw"].number(), r["pitch"].number(), r["roll"].number()};
}

json polygon_to_json(const Polygon2 & p)
{
  json arr = json::array();
  for (const auto & v : p.vertices()) {
    arr.push_back({v.x, v.y});
  }
  return arr;
}

Polygon2 polygon_from(const Reader & r)
{
  std::vector<geometry::Vec2> v;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Reader pt = r[i];
    if (pt.size() != 2) {
      pt.fail("expected [x, y]");
    }
    v.push_back({pt[std::size_t{0}].number(), pt[std::size_t{1}].number()});
  }
  try {
    return Polygon2::from_vertices(std::move(v));
  } catch (const geometry::GeometryError & e) {
    r.fail(e.what());
  }
}

ParentRef parent_from(const Reader & r)
{
  return {NodeId{r["id"].unsigned_int()}, point_from(r["position"])};
}

template<typename Node, typename F>
json graph_to_json(const LocalGraph<Node> & g, F && node_to_json)
{
  json nodes = json::array();
  for (const auto & n : g.children()) {
    nodes.push_back(node_to_json(n));
  }
  json edges = json::array();
  for (const auto & e : g.edges()) {
    edges.push_back(edge_to_json(e));
  }
  return {
    {"parent", {{"id", raw(g.parent().id)}, {"position", point_to_json(g.parent().position)}}},
    {"nodes", std::move(nodes)},
    {"edges", std::move(edges)}};
}

template<typename Node, typename F>
LocalGraph<Node> graph_from(const Reader & r, F && node_from)
{
  LocalGraph<Node> g(parent_from(r["parent"]));
  const Reader nodes = r["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      g.add_child(node_from(nodes[i]));
    } catch (const StructureError & e) {
      nodes[i].fail(e.what());
    }
  }
  const Reader edges = r["edges"];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edge_from(edges[i]);
    try {
      g.add_edge(e.a, e.b, e.attr);
    } catch (const StructureError & err) {
      edges[i].fail(err.what());
    }
  }
  return g;
}

json feature_to_json(const FeatureNode & f)
{
  return {{"id", raw(f.id)}, {"label", f.label}, {"class_label", f.class_label},
    {"position", point_to_json(f.position)}, {"confidence", f.confidence},
    {"mask_area_px", f.mask_area_px}};
}

FeatureNode feature_from(const Reader & r)
{
  FeatureNode f;
  f.id = NodeId{r["id"].unsigned_int()};
  f.label = r["label"].string();
  f.class_label = r["class_label"].string();
  f.position = point_from(r["position"]);
  f.confidence = r["confidence"].number();
  f.mask_area_px = r["mask_area_px"].number();
  return f;
}

json pose_node_to_json(const PoseNode & p)
{
  json j{{"id", raw(p.id)}, {"pose", pose_to_json(p.pose)}, {"image_ref", p.image_ref},
    {"feature_graph", nullptr}};
  if (p.feature_graph) {
    j["feature_graph"] = graph_to_json(*p.feature_graph, feature_to_json);
  }
  return j;
}

PoseNode pose_node_from(const Reader & r)
{
  PoseNode p;
  p.id = NodeId{r["id"].unsigned_int()};
  p.pose = pose_from(r["pose"]);
  p.image_ref = r["image_ref"].string();
  if (r.has("feature_graph")) {
    p.feature_graph = graph_from<FeatureNode>(r["feature_graph"], feature_from);
  }
  return p;
}

json level_to_json(const LevelNode & l)
{
  json j{{"id", raw(l.id)}, {"index", l.index}, {"position", point_to_json(l.position)},
    {"pose_graph", nullptr}};
  if (l.pose_graph) {
    j["pose_graph"] = graph_to_json(*l.pose_graph, pose_node_to_json);
  }
  return j;
}

LevelNode level_from(const Reader & r)
{
  LevelNode l;
  l.id = NodeId{r["id"].unsigned_int()};
  l.index = r["index"].integer();
  l.position = point_from(r["position"]);
  if (r.has("pose_graph")) {
    l.pose_graph = graph_from<PoseNode>(r["pose_graph"], pose_node_from);
  }
  return l;
}

json level_graph_to_json(const LevelGraph & g)
{
  return graph_to_json(g, level_to_json);
}

json target_to_json(const TargetNode & t)
{
  const Detection & d = t.detection;
  json j{
    {"id", raw(t.id)},
    {"state", t.inspected() ? "inspected" : "detected"},
    {"label", t.label},
    {"est_position", point_to_json(t.est_position)},
    {"detection", {{"class_label", d.class_label}, {"confidence", d.confidence},
      {"mask_area_px", d.mask_area_px}, {"image_ref", d.image_ref},
      {"image_w", d.image_w}, {"image_h", d.image_h}}},
    {"utility", nullptr},
    {"polygon", nullptr},
    {"level_graph", nullptr}};
  if (t.utility) {
    j["utility"] = *t.utility;
  }
  if (t.polygon) {
    j["polygon"] = polygon_to_json(*t.polygon);
  }
  if (t.level_graph) {
    j["level_graph"] = level_graph_to_json(*t.level_graph);
  }
  return j;
}

TargetNode target_from(const Reader & r)
{
  TargetNode t;
  t.id = NodeId{r["id"].unsigned_int()};
  const std::string state = r["state"].string();
  if (state == "inspected") {
    t.state = TargetState::Inspected;
  } else if (state == "detected") {
    t.state = TargetState::Detected;
  } else {
    r["state"].fail("unknown target state '" + state + "'");
  }
  t.label = r["label"].string();
  t.est_position = point_from(r["est_position"]);
  const Reader d = r["detection"];
  t.detection.class_label = d["class_label"].string();
  t.detection.confidence = d["confidence"].number();
  t.detection.mask_area_px = d["mask_area_px"].number();
  t.detection.image_ref = d["image_ref"].string();
  t.detection.image_w = d["image_w"].integer();
  t.detection.image_h = d["image_h"].integer();
  try {
    validate(t.detection);
  } catch (const std::invalid_argument & e) {
    d.fail(e.what());
  }
  if (r.has("utility")) {
    t.utility = r["utility"].number();
  }
  if (r.has("polygon")) {
    t.polygon = polygon_from(r["polygon"]);
  }
  if (r.has("level_graph")) {
    t.level_graph = graph_from<LevelNode>(r["level_graph"], level_from);
  }
  return t;
}

}  // namespace

json point_to_json(const Point3 & p)
{
  return json::array({p.x, p.y, p.z});
}

json pose_to_json(const Pose6 & p)
{
  return {{"position", point_to_json(p.position)}, {"yaw", p.yaw}, {"pitch", p.pitch},
    {"roll", p.roll}};
}

json to_json_document(const Lsg & lsg)
{
  json events = json::array();
  for (const auto & e : lsg.events()) {
    events.push_back({{"t", e.t}, {"layer", to_string(e.layer)}, {"kind", to_string(e.kind)},
        {"a", raw(e.a)}, {"b", raw(e.b)}});
  }
  json pending = nullptr;
  if (const auto & p = lsg.pending()) {
    pending = {{"target", raw(p->target)}, {"level_graph", nullptr}};
    if (p->level_graph) {
      pending["level_graph"] = level_graph_to_json(*p->level_graph);
    }
  }
  return {
    {"format", "lsg"},
    {"version", kLsgFormatVersion},
    {"robot_pose", pose_to_json(lsg.robot_pose())},
    {"base_pose", pose_to_json(lsg.base_pose())},
    {"clock", lsg.time()},
    {"last_id", lsg.last_id()},
    {"target_graph", graph_to_json(lsg.target_graph(), target_to_json)},
    {"pending", std::move(pending)},
    {"events", std::move(events)}};
}

Lsg from_json_document(const json & doc)
{
  const Reader r(doc, "");
  if (r["format"].string() != "lsg") {
    r["format"].fail("not an lsg document");
  }
  if (r["version"].integer() != kLsgFormatVersion) {
    r["version"].fail("unsupported version " + std::to_string(r["version"].integer()));
  }
  std::optional<PendingInspection> pending;
  if (r.has("pending")) {
    const Reader p = r["pending"];
    pending = PendingInspection{NodeId{p["target"].unsigned_int()}, std::nullopt};
    if (p.has("level_graph")) {
      pending->level_graph = graph_from<LevelNode>(p["level_graph"], level_from);
    }
  }
  std::vector<GraphEvent> events;
  const Reader ev = r["events"];
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const Reader e = ev[i];
    try {
      events.push_back({e["t"].number(), layer_from_string(e["layer"].string()),
          event_kind_from_string(e["kind"].string()), NodeId{e["a"].unsigned_int()},
          NodeId{e["b"].unsigned_int()}});
    } catch (const std::invalid_argument & err) {
      e.fail(err.what());
    }
  }
  Lsg g = Lsg::from_parts(
    pose_from(r["robot_pose"]), pose_from(r["base_pose"]), r["clock"].number(),
    r["last_id"].unsigned_int(), graph_from<TargetNode>(r["target_graph"], target_from),
    std::move(pending), std::move(events));
  if (const std::string err = check_invariants(g); !err.empty()) {
    throw DocumentError("document violates graph invariants: " + err);
  }
  return g;
}

std::string serialize(const Lsg & lsg)
{
  return to_json_document(lsg).dump(1);
}

Lsg deserialize(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw DocumentError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return from_json_document(doc);
}

json union_to_json(const FlatGraph & g)
{
  json nodes = json::array();
  for (const auto & n : g.nodes) {
    nodes.push_back({{"id", raw(n.id)}, {"layer", to_string(n.layer)}, {"label", n.label},
        {"position", point_to_json(n.position)}});
  }
  json edges = json::array();
  for (const auto & e : g.edges) {
    json j = edge_to_json({e.a, e.b, e.attr});
    j["layer"] = to_string(e.layer);
    edges.push_back(std::move(j));
  }
  return {{"format", "lsg-union"}, {"version", kLsgFormatVersion}, {"nodes", std::move(nodes)},
    {"edges", std::move(edges)}};
}

FlatGraph union_from_json(const json & doc)
{
  const Reader r(doc, "");
  if (r["format"].string() != "lsg-union") {
    r["format"].fail("not an lsg-union document");
  }
  FlatGraph g;
  const Reader nodes = r["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Reader n = nodes[i];
    try {
      g.nodes.push_back({NodeId{n["id"].unsigned_int()}, layer_from_string(n["layer"].string()),
          n["label"].string(), point_from(n["position"])});
    } catch (const std::invalid_argument & e) {
      n.fail(e.what());
    }
  }
  const Reader edges = r["edges"];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edge_from(edges[i]);
    try {
      g.edges.push_back({e.a, e.b, e.attr, layer_from_string(edges[i]["layer"].string())});
    } catch (const std::invalid_argument & err) {
      edges[i].fail(err.what());
    }
  }
  return g;
}

}  // namespace lsg
