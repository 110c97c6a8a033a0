#ifndef LSG_GRAPH_UNION_HPP
#define LSG_GRAPH_UNION_HPP

#include <string>
#include <vector>

#include "lsg/lsg.hpp"

namespace lsg
{

struct FlatNode
{
  NodeId id{};
  LayerKind layer{LayerKind::Target};
  std::string label;
  Point3 position;

  bool operator==(const FlatNode &) const = default;
};

struct FlatEdge
{
  NodeId a{};
  NodeId b{};
  EdgeAttr attr;
  LayerKind layer{LayerKind::Target};   ///< layer of the local graph holding the edge

  bool operator==(const FlatEdge &) const = default;
};

/// Single-level graph with parent copies merged into their originals.
struct FlatGraph
{
  std::vector<FlatNode> nodes;   ///< sorted by id
  std::vector<FlatEdge> edges;   ///< in local-graph traversal order

  std::size_t order() const {return nodes.size();}
  std::size_t size() const {return edges.size();}
  bool operator==(const FlatGraph &) const = default;
};

FlatGraph graph_union(const Lsg & lsg);

/// Merges two flat graphs by id; edges present in both (same endpoints) are kept once.
FlatGraph merge(const FlatGraph & a, const FlatGraph & b);

/// Number of distinct entities (robot, targets, levels, poses, features).
std::size_t entity_count(const Lsg & lsg);

}  // namespace lsg

#endif  // LSG_GRAPH_UNION_HPP
