#ifndef LSG_MISSION_HPP
#define LSG_MISSION_HPP

/**
 * \file
 * \brief Explore-inspect-explore mission loop over the simulated world.
 *
 *     Survey360 -> (SelectTarget -> NavigateToTarget -> Inspect -> LocalExplore)*
 *               -> ReturnToBase -> Done
 */

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsg/hplanner.hpp"
#include "lsg/lsg.hpp"
#include "lsg/world.hpp"

namespace lsg::mission
{

struct UtilityWeights
{
  double s_p{1.0};
  double s_a{1.0};
  double s_n{1.0};

  bool operator==(const UtilityWeights &) const = default;
};

struct MissionConfig
{
  UtilityWeights weights;
  double d_valid{5.0};
  int survey_steps{12};
  double standoff{2.0};
  double orbit_radius{3.0};
  int orbit_waypoints{8};
  double level_step{2.0};
  double pose_step{1.0};
  int max_poses_per_level{400};
  double speed{1.0};
  double traversal_margin{8.0};
  double approach_distance{5.0};
  double cell_size{0.8};
  int risk_factor{2};
  double risk_multiplier{2.0};
  int max_selections{200};
  sim::SensorModel sensor;

  bool operator==(const MissionConfig &) const = default;
};

/// Throws std::invalid_argument naming the first out-of-range field.
void validate(const MissionConfig & c);
MissionConfig config_from_json(const nlohmann::json & doc);
nlohmann::json config_to_json(const MissionConfig & c);
MissionConfig load_config(const std::filesystem::path & path);

enum class MissionPhase { Survey360, SelectTarget, NavigateToTarget, Inspect, LocalExplore,
  ReturnToBase, Done };
std::string to_string(MissionPhase p);

/// Weighted sum of proximity, normalized mask area and neighbour centrality.
double utility(const TargetNode & node, const Pose6 & robot,
  const std::vector<const TargetNode *> & detected, const UtilityWeights & w);

/// Argmax of utility over Detected nodes not in `skip`; ties go to the smaller id.
std::optional<NodeId> select_target(const Lsg & lsg, const Pose6 & robot,
  const UtilityWeights & w, const std::set<NodeId> & skip = {});

/// Perimeter view poses, one vector per level, starting near `entry_hint`.
std::vector<std::vector<Pose6>> plan_inspection(const geometry::Polygon2 & footprint,
  double height, const geometry::Vec2 & entry_hint, const MissionConfig & c);

struct MetricsSample
{
  double t{0.0};
  MissionPhase phase{MissionPhase::Survey360};
  LayerMetrics metrics{};
  bool prune{false};
};

struct MissionEvent
{
  double t{0.0};
  MissionPhase phase{MissionPhase::Survey360};
  std::string kind;
  nlohmann::json detail;
};

struct PlanRecord
{
  double t{0.0};
  std::string query;
  hp::PlanResult plan;
};

/// Snapshot taken at each SelectTarget entry.
struct SelectionRecord
{
  Pose6 robot;
  std::vector<TargetNode> detected;
  std::set<NodeId> skip;
  NodeId chosen{};
};

struct MissionResult
{
  Lsg lsg;
  std::vector<MetricsSample> trace;
  std::vector<MissionEvent> log;
  std::vector<PlanRecord> plans;
  MissionPhase final_phase{MissionPhase::Survey360};
  bool aborted{false};
  std::string abort_reason;
  std::set<NodeId> skipped;
  std::vector<SelectionRecord> selections;
  double sim_time{0.0};
  Pose6 final_pose;
};

MissionResult run_mission(const sim::Scenario & scenario, const MissionConfig & config);

}  // namespace lsg::mission

#endif  // LSG_MISSION_HPP
