#ifndef LSG_DIJKSTRA_HPP
#define LSG_DIJKSTRA_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsg/local_graph.hpp"

namespace lsg::hp
{

using geometry::Point3;

class NoPathError : public std::runtime_error
{
public:
  NoPathError(NodeId src, NodeId dst);

  NodeId src() const {return src_;}
  NodeId dst() const {return dst_;}

private:
  NodeId src_;
  NodeId dst_;
};

struct WeightedEdge
{
  NodeId a{};
  NodeId b{};
  double weight{0.0};
};

/// Uniformly weighted view of one local graph, built at plan time.
class PlanningGraph
{
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void reserve(std::size_t nodes, std::size_t edges);
  void add_node(NodeId id, const Point3 & position);
  /// Symbolic edges pass the Euclidean distance between their endpoints.
  void add_edge(NodeId a, NodeId b, double weight);
  /// The node may be a path endpoint but never an interior vertex.
  void forbid_transit(NodeId id);

  /// Insertion index of a node, or npos.
  std::size_t index_of(NodeId id) const;
  bool contains(NodeId id) const {return index_of(id) != npos;}
  const Point3 & position(NodeId id) const;
  const std::vector<NodeId> & ids() const {return ids_;}
  const std::vector<Point3> & positions() const {return positions_;}
  const std::vector<WeightedEdge> & edges() const {return edges_;}
  bool transit_allowed(std::size_t index) const {return !no_transit_[index];}
  std::size_t order() const {return ids_.size();}
  std::size_t size() const {return edges_.size();}

private:
  std::vector<NodeId> ids_;
  std::vector<Point3> positions_;
  std::vector<char> no_transit_;
  std::vector<std::pair<NodeId, std::size_t>> sorted_;
  std::vector<WeightedEdge> edges_;
};

/// Builds the planning view of a local graph (parent copy included).
template<typename Node>
PlanningGraph planning_graph(const LocalGraph<Node> & g)
{
  PlanningGraph pg;
  pg.reserve(g.order(), g.size());
  pg.add_node(g.parent().id, g.parent().position);
  for (const Node & n : g.children()) {
    pg.add_node(n.id, node_position(n));
  }
  for (const Edge & e : g.edges()) {
    const double w = e.attr.kind == EdgeKind::Weighted ?
      e.attr.weight : geometry::euclidean(pg.position(e.a), pg.position(e.b));
    pg.add_edge(e.a, e.b, w);
  }
  return pg;
}

struct PathResult
{
  std::vector<NodeId> nodes;
  double length{0.0};
};

/// Shortest path; among equal-cost predecessors the smaller id wins.
PathResult dijkstra(const PlanningGraph & g, NodeId src, NodeId dst);

}  // namespace lsg::hp

#endif  // LSG_DIJKSTRA_HPP
