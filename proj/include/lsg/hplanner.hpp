#ifndef LSG_HPLANNER_HPP
#define LSG_HPLANNER_HPP

/**
 * \file
 * \brief Hierarchical planning over the nested layers.
 *
 * A landmark route is found on the Target layer; each landmark on the route
 * is then crossed locally (Pose graph up to its level, Level graph down to
 * Level-0, Pose graph out toward the next landmark). Free-space legs between
 * landmarks are handed to a LegRefiner.
 */

#include <array>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lsg/dijkstra.hpp"
#include "lsg/lsg.hpp"

namespace lsg::hp
{

/// Raised when no plan can be produced (no inspected targets, disconnected layers).
class PlanningError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct TerminalSpec
{
  NodeId target{};                 ///< kRobotId means "return to base"
  std::optional<NodeId> level;
  std::optional<NodeId> pose;

  bool operator==(const TerminalSpec &) const = default;
};

/// Throws std::invalid_argument when a pose is given without a level.
void validate(const TerminalSpec & t);

struct Localization
{
  NodeId target{kRobotId};
  std::optional<NodeId> level;
  std::optional<NodeId> pose;
  bool inside_polygon{false};
};

/// Containing Inspected polygon first, else nearest est_position; then nearest stored pose.
Localization localize(const Lsg & lsg, const Pose6 & robot);

struct LocalSegment
{
  LayerKind layer{LayerKind::Pose};
  NodeId owner{};                  ///< parent of the local graph searched
  std::vector<NodeId> nodes;
  std::vector<Point3> points;
  double length{0.0};
};

struct Leg
{
  Point3 from;
  Point3 to;
  std::vector<Point3> path;        ///< from ... to
  double length{0.0};
  bool refined{false};             ///< true when the straight segment was replaced
};

/// Turns a free-space leg into a collision-free polyline (throws when impossible).
using LegRefiner = std::function<std::vector<Point3>(const Point3 &, const Point3 &)>;

struct LayerStats
{
  int invocations{0};              ///< zero reads as "Nil"
  double time_ms{0.0};
  double length{0.0};
  std::size_t edges{0};
  std::size_t nodes{0};
};

/// Identifies one local graph by layer and owning parent node.
using GraphRef = std::pair<LayerKind, NodeId>;

struct PlanResult
{
  TerminalSpec terminal;
  std::vector<NodeId> landmark_route;
  std::vector<LocalSegment> segments;
  std::vector<Leg> legs;
  std::vector<Point3> waypoints;   ///< complete polyline from the robot position
  double total_length{0.0};
  std::array<LayerStats, 3> layers{};   ///< Target, Level, Pose
  double leg_time_ms{0.0};
  std::set<GraphRef> visited_graphs;

  const LayerStats & stats(LayerKind k) const {return layers.at(static_cast<std::size_t>(k));}
  /// Sum of the per-layer search times.
  double plan_time_ms() const;
};

struct PlannerOptions
{
  /// Distance kept from a Detected terminal's estimated centroid.
  double approach_distance{5.0};
  LegRefiner refine;               ///< empty: straight legs
};

/// Target layer restricted to the robot node and Inspected targets.
PlanningGraph target_planning_graph(const Lsg & lsg);

PlanResult plan_hierarchical(const Lsg & lsg, const Pose6 & robot, const TerminalSpec & terminal,
  const PlannerOptions & options = {});

}  // namespace lsg::hp

#endif  // LSG_HPLANNER_HPP
