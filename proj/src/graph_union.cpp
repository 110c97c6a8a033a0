#include "lsg/graph_union.hpp"

#include <algorithm>
#include <map>

namespace lsg
{

namespace
{

template<typename Node>
void append_edges(const LocalGraph<Node> & g, LayerKind layer, std::vector<FlatEdge> & out)
{
  for (const auto & e : g.edges()) {
    out.push_back({e.a, e.b, e.attr, layer});
  }
}

}  // namespace

FlatGraph graph_union(const Lsg & lsg)
{
  std::map<NodeId, FlatNode> nodes;
  FlatGraph flat;
  const TargetGraph & tg = lsg.target_graph();
  nodes[kRobotId] = {kRobotId, LayerKind::Target, "robot", tg.parent().position};
  append_edges(tg, LayerKind::Target, flat.edges);
  for (const auto & t : tg.children()) {
    nodes[t.id] = {t.id, LayerKind::Target, t.display_name(), t.est_position};
    const LevelGraph * lg = lsg.level_graph_of(t.id);
    if (!lg) {
      continue;
    }
    append_edges(*lg, LayerKind::Level, flat.edges);
    for (const auto & l : lg->children()) {
      nodes[l.id] = {l.id, LayerKind::Level, l.label(), l.position};
      if (!l.pose_graph) {
        continue;
      }
      append_edges(*l.pose_graph, LayerKind::Pose, flat.edges);
      for (const auto & p : l.pose_graph->children()) {
        nodes[p.id] = {p.id, LayerKind::Pose, "Pose-" + to_string(p.id), p.pose.position};
        if (!p.feature_graph) {
          continue;
        }
        append_edges(*p.feature_graph, LayerKind::Feature, flat.edges);
        for (const auto & f : p.feature_graph->children()) {
          nodes[f.id] = {f.id, LayerKind::Feature, f.label, f.position};
        }
      }
    }
  }
  flat.nodes.reserve(nodes.size());
  for (auto & [id, n] : nodes) {
    flat.nodes.push_back(std::move(n));
  }
  return flat;
}

FlatGraph merge(const FlatGraph & a, const FlatGraph & b)
{
  std::map<NodeId, FlatNode> nodes;
  for (const auto & n : a.nodes) {
    nodes.emplace(n.id, n);
  }
  for (const auto & n : b.nodes) {
    nodes.emplace(n.id, n);
  }
  FlatGraph out;
  for (auto & [id, n] : nodes) {
    out.nodes.push_back(n);
  }
  out.edges = a.edges;
  for (const auto & e : b.edges) {
    const bool present = std::any_of(out.edges.begin(), out.edges.end(),
        [&](const FlatEdge & x) {
          return (x.a == e.a && x.b == e.b) || (x.a == e.b && x.b == e.a);
        });
    if (!present) {
      out.edges.push_back(e);
    }
  }
  return out;
}

std::size_t entity_count(const Lsg & lsg)
{
  std::size_t n = 1;
  for (const auto & t : lsg.target_graph().children()) {
    ++n;
    const LevelGraph * lg = lsg.level_graph_of(t.id);
    if (!lg) {
      continue;
    }
    for (const auto & l : lg->children()) {
      ++n;
      if (!l.pose_graph) {
        continue;
      }
      for (const auto & p : l.pose_graph->children()) {
        ++n;
        n += p.feature_graph ? p.feature_graph->children().size() : 0;
      }
    }
  }
  return n;
}

}  // namespace lsg
