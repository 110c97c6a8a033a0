#ifndef LSG_LOCAL_GRAPH_HPP
#define LSG_LOCAL_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lsg/geometry.hpp"

namespace lsg
{

/// Identifier unique across every layer of one graph.
enum class NodeId : std::uint64_t {};

constexpr std::uint64_t raw(NodeId id) {return static_cast<std::uint64_t>(id);}
inline std::string to_string(NodeId id) {return std::to_string(raw(id));}

/// The robot node; parent of the Target layer.
inline constexpr NodeId kRobotId{0};

enum class LayerKind { Target = 0, Level = 1, Pose = 2, Feature = 3 };
inline constexpr std::size_t kLayerCount = 4;

std::string to_string(LayerKind layer);
LayerKind layer_from_string(const std::string & name);

/// Raised when a mutation would break a structural invariant.
class StructureError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class EdgeKind { Symbolic, Weighted };

struct EdgeAttr
{
  EdgeKind kind{EdgeKind::Symbolic};
  double weight{0.0};  ///< meters; meaningful only for Weighted edges

  static EdgeAttr symbolic() {return {EdgeKind::Symbolic, 0.0};}
  static EdgeAttr weighted(double w);

  bool operator==(const EdgeAttr &) const = default;
};

struct Edge
{
  NodeId a{};
  NodeId b{};
  EdgeAttr attr;

  bool operator==(const Edge &) const = default;
  bool joins(NodeId u, NodeId v) const {return (a == u && b == v) || (a == v && b == u);}
};

/// Copy of the node one layer up; holds the original's id and position.
struct ParentRef
{
  NodeId id{};
  geometry::Point3 position;

  bool operator==(const ParentRef &) const = default;
};

/**
 * \brief Single-layer undirected graph with a designated parent node.
 *
 * Every edge endpoint is either the parent copy or one of the children; no
 * self-loops and no duplicate edges are admitted.
 */
template<typename Node>
class LocalGraph
{
public:
  LocalGraph() = default;
  explicit LocalGraph(ParentRef parent)
  : parent_(parent) {}

  const ParentRef & parent() const {return parent_;}
  const std::vector<Node> & children() const {return children_;}
  std::vector<Node> & children() {return children_;}
  const std::vector<Edge> & edges() const {return edges_;}

  std::size_t order() const {return 1 + children_.size();}
  std::size_t size() const {return edges_.size();}

  bool contains(NodeId id) const {return id == parent_.id || find(id) != nullptr;}

  const Node * find(NodeId id) const
  {
    auto it = std::find_if(children_.begin(), children_.end(),
        [id](const Node & n) {return n.id == id;});
    return it == children_.end() ? nullptr : &*it;
  }
  Node * find(NodeId id)
  {
    return const_cast<Node *>(std::as_const(*this).find(id));
  }

  Node & add_child(Node node)
  {
    if (contains(node.id)) {
      throw StructureError("duplicate node id " + to_string(node.id));
    }
    children_.push_back(std::move(node));
    return children_.back();
  }

  bool has_edge(NodeId u, NodeId v) const
  {
    return std::any_of(edges_.begin(), edges_.end(),
             [&](const Edge & e) {return e.joins(u, v);});
  }

  void add_edge(NodeId u, NodeId v, EdgeAttr attr)
  {
    if (u == v) {
      throw StructureError("self-loop on node " + to_string(u));
    }
    if (!contains(u) || !contains(v)) {
      throw StructureError("edge endpoint outside local graph: " + to_string(u) + "-" +
              to_string(v));
    }
    if (has_edge(u, v)) {
      throw StructureError("duplicate edge " + to_string(u) + "-" + to_string(v));
    }
    edges_.push_back({u, v, attr});
  }

  bool remove_edge(NodeId u, NodeId v)
  {
    auto it = std::find_if(edges_.begin(), edges_.end(),
        [&](const Edge & e) {return e.joins(u, v);});
    if (it == edges_.end()) {
      return false;
    }
    edges_.erase(it);
    return true;
  }

  /// Removes the child and its incident edges; returns the removed edges.
  std::vector<Edge> remove_child(NodeId id)
  {
    std::vector<Edge> removed;
    auto it = std::find_if(children_.begin(), children_.end(),
        [id](const Node & n) {return n.id == id;});
    if (it == children_.end()) {
      return removed;
    }
    children_.erase(it);
    auto keep = std::stable_partition(edges_.begin(), edges_.end(),
        [id](const Edge & e) {return e.a != id && e.b != id;});
    removed.assign(keep, edges_.end());
    edges_.erase(keep, edges_.end());
    return removed;
  }

  std::optional<geometry::Point3> position_of(NodeId id) const
  {
    if (id == parent_.id) {
      return parent_.position;
    }
    if (const Node * n = find(id)) {
      return node_position(*n);
    }
    return std::nullopt;
  }

  bool operator==(const LocalGraph &) const = default;

private:
  ParentRef parent_;
  std::vector<Node> children_;
  std::vector<Edge> edges_;
};

}  // namespace lsg

#endif  // LSG_LOCAL_GRAPH_HPP
