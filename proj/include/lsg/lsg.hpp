#ifndef LSG_LSG_HPP
#define LSG_LSG_HPP

/**
 * \file
 * \brief The nested four-layer scene graph.
 *
 * The Target layer graph is owned directly by Lsg. Deeper layers live inside
 * node attributes: an inspected TargetNode owns its Level graph, each
 * LevelNode owns a Pose graph and each PoseNode owns a Feature graph. Nested
 * graphs are created lazily with their first child, so an empty layer is
 * never counted.
 */

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lsg/geometry.hpp"
#include "lsg/local_graph.hpp"

namespace lsg
{

using geometry::Point3;
using geometry::Polygon2;
using geometry::Pose6;

struct Detection
{
  std::string class_label;
  double confidence{0.0};   ///< [0, 1]
  double mask_area_px{0.0};
  std::string image_ref;
  int image_w{640};
  int image_h{480};

  bool operator==(const Detection &) const = default;
};

/// Validates the Detection invariants, throwing std::invalid_argument.
void validate(const Detection & d);

struct FeatureNode
{
  NodeId id{};
  std::string label;         ///< class label plus per-level suffix index, e.g. "hood-1"
  std::string class_label;
  Point3 position;
  double confidence{0.0};
  double mask_area_px{0.0};

  bool operator==(const FeatureNode &) const = default;
};

struct PoseNode
{
  NodeId id{};
  Pose6 pose;
  std::string image_ref;
  std::optional<LocalGraph<FeatureNode>> feature_graph;

  bool operator==(const PoseNode &) const = default;
};

struct LevelNode
{
  NodeId id{};
  int index{0};
  Point3 position;
  std::optional<LocalGraph<PoseNode>> pose_graph;

  std::string label() const {return "Level-" + std::to_string(index);}
  bool operator==(const LevelNode &) const = default;
};

enum class TargetState { Detected, Inspected };

struct TargetNode
{
  NodeId id{};
  TargetState state{TargetState::Detected};
  std::string label;   ///< assigned at promotion, e.g. "car-1"
  Point3 est_position;
  Detection detection;
  std::optional<double> utility;
  std::optional<Polygon2> polygon;
  std::optional<LocalGraph<LevelNode>> level_graph;

  bool inspected() const {return state == TargetState::Inspected;}
  /// Human readable name, e.g. "Target-I-car-0" or "Target-D-car-17".
  std::string display_name() const;
  bool operator==(const TargetNode &) const = default;
};

inline const Point3 & node_position(const TargetNode & n) {return n.est_position;}
inline const Point3 & node_position(const LevelNode & n) {return n.position;}
inline const Point3 & node_position(const PoseNode & n) {return n.pose.position;}
inline const Point3 & node_position(const FeatureNode & n) {return n.position;}

using TargetGraph = LocalGraph<TargetNode>;
using LevelGraph = LocalGraph<LevelNode>;
using PoseGraph = LocalGraph<PoseNode>;
using FeatureGraph = LocalGraph<FeatureNode>;

enum class EventKind { NodeAdded, EdgeAdded, NodeRemoved, EdgeRemoved, Promoted };
std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string & name);

struct GraphEvent
{
  double t{0.0};        ///< simulation seconds
  LayerKind layer{LayerKind::Target};
  EventKind kind{EventKind::NodeAdded};
  NodeId a{};
  NodeId b{};           ///< second endpoint for edge events, else equal to a

  bool operator==(const GraphEvent &) const = default;
};

struct LayerCount
{
  std::size_t order{0};
  std::size_t size{0};
  bool operator==(const LayerCount &) const = default;
};

/// Cumulative (order, size) per layer, parent copies included.
using LayerMetrics = std::array<LayerCount, kLayerCount>;

/// Feature observation handed to Lsg::add_feature.
struct FeatureObservation
{
  std::string class_label;
  Point3 position;
  double confidence{1.0};
  double mask_area_px{0.0};
};

/// Returns true when the straight segment between two points is unobstructed.
using VisibilityFn = std::function<bool (const Point3 &, const Point3 &)>;

/// Level graph under construction for a target that is still Detected.
struct PendingInspection
{
  NodeId target{};
  std::optional<LevelGraph> level_graph;

  bool operator==(const PendingInspection &) const = default;
};

class Lsg
{
public:
  Lsg() : Lsg(Pose6{}) {}
  explicit Lsg(const Pose6 & robot_pose);

  const Pose6 & robot_pose() const {return robot_pose_;}
  void set_robot_pose(const Pose6 & pose);
  /// Start pose; the robot parent node sits here for planning.
  const Pose6 & base_pose() const {return base_pose_;}

  double time() const {return clock_;}
  /// Advances the event clock; time may not run backwards.
  void set_time(double t);

  const TargetGraph & target_graph() const {return targets_;}
  const std::vector<GraphEvent> & events() const {return events_;}
  std::uint64_t last_id() const {return last_id_;}
  const std::optional<PendingInspection> & pending() const {return pending_;}

  const TargetNode * find_target(NodeId id) const;
  const LevelNode * find_level(NodeId id) const;
  const PoseNode * find_pose(NodeId id) const;
  /// Target that owns (directly or transitively) the given level.
  const TargetNode * owner_of_level(NodeId level) const;
  const LevelNode * owner_of_pose(NodeId pose) const;
  /// Level graph of a target, including one under construction.
  const LevelGraph * level_graph_of(NodeId target) const;

  std::vector<const TargetNode *> detected() const;
  std::vector<const TargetNode *> inspected() const;

  NodeId register_detected(const Detection & detection, const Point3 & est_position);

  /**
   * \brief Removes duplicate and already-inspected Detected nodes.
   *
   * Detected nodes inside an Inspected polygon go first. Then candidates are
   * scanned in ascending id; within a pair closer than d_valid the node with
   * the lexicographically smaller (confidence, mask area) is removed, ties
   * removing the larger id. The result is a fixpoint.
   */
  std::vector<NodeId> prune_targets(double d_valid = 5.0);

  void set_utility(NodeId target, double u);

  /// Opens a staging level graph for a Detected target about to be inspected.
  void begin_inspection(NodeId target);
  NodeId add_level(NodeId target, const Point3 & position);
  NodeId add_pose(NodeId level, const Pose6 & pose, const std::string & image_ref);
  NodeId add_feature(NodeId pose, const FeatureObservation & feature);

  /// Promotes using the staged level graph from begin_inspection/add_level.
  const TargetNode & promote_to_inspected(NodeId id, Polygon2 polygon);
  /// Promotes with an externally assembled level graph.
  const TargetNode & promote_to_inspected(NodeId id, Polygon2 polygon, LevelGraph level_graph);

  /// Adds weighted traversal edges between mutually visible Inspected targets.
  std::vector<Edge> refresh_traversal_edges(const VisibilityFn & visible, double margin = 2.0);

  LayerMetrics layer_metrics() const;
  /// Number of nested local graphs; each carries one parent copy.
  std::size_t parent_copy_count() const;

  bool operator==(const Lsg &) const = default;

  /// Direct construction from already validated parts (used by deserialization).
  static Lsg from_parts(
    Pose6 robot_pose, Pose6 base_pose, double clock, std::uint64_t last_id,
    TargetGraph targets, std::optional<PendingInspection> pending,
    std::vector<GraphEvent> events);

private:
  NodeId next_id();
  void log(LayerKind layer, EventKind kind, NodeId a, NodeId b);
  void log(LayerKind layer, EventKind kind, NodeId a) {log(layer, kind, a, a);}
  LevelGraph * mutable_level_graph(NodeId target);
  LevelNode * mutable_level(NodeId level);
  PoseNode * mutable_pose(NodeId pose, LevelNode ** owner = nullptr);

  Pose6 robot_pose_;
  Pose6 base_pose_;
  double clock_{0.0};
  std::uint64_t last_id_{0};
  TargetGraph targets_;
  std::optional<PendingInspection> pending_;
  std::vector<GraphEvent> events_;
};

/// Checks every structural invariant; returns the first violation or empty.
std::string check_invariants(const Lsg & lsg);

}  // namespace lsg

#endif  // LSG_LSG_HPP
