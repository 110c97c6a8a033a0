#ifndef LSG_WORLD_HPP
#define LSG_WORLD_HPP

/**
 * \file
 * \brief Deterministic 2.5D world: footprints, ground-truth robot pose and an
 *        oracle detector standing in for the segmentation models.
 *
 * Footprints are planar polygons; heights only offset level positions and
 * feature attach points. Occlusion is a segment/footprint intersection test.
 */

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsg/geometry.hpp"
#include "lsg/lsg.hpp"

namespace lsg::sim
{

using geometry::Bounds2;
using geometry::Vec2;

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class CollisionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class OutOfBoundsError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct FeatureSpec
{
  std::string class_label;
  Vec2 attach;        ///< on the footprint perimeter
  double height{0.0}; ///< nominal height of the attach point
  Vec2 normal;        ///< outward surface normal, derived at load time

  bool operator==(const FeatureSpec &) const = default;
};

struct TargetSpec
{
  std::string class_label;
  Polygon2 footprint;
  double height{1.5};
  double reliability{1.0};   ///< probability the detector reports this target
  std::vector<FeatureSpec> features;

  bool operator==(const TargetSpec &) const = default;
};

struct Scenario
{
  std::string name;
  Bounds2 bounds;
  std::vector<Polygon2> obstacles;
  std::vector<TargetSpec> targets;
  Pose6 robot_start;
  std::uint64_t seed{0};

  bool operator==(const Scenario &) const = default;
};

inline constexpr int kScenarioFormatVersion = 1;

/// Checks footprint overlap, start placement and per-field ranges.
void validate(const Scenario & s);

Scenario scenario_from_json(const nlohmann::json & doc);
nlohmann::json scenario_to_json(const Scenario & s);
Scenario load_scenario(const std::filesystem::path & path);

struct SensorModel
{
  double fov{1.5707963267948966};   ///< horizontal, radians
  double max_range{20.0};           ///< meters
  int image_w{640};
  int image_h{480};
  /// Mask area calibration: a 2 m x 4 m footprint at 10 m fills ~2% of 640x480.
  double mask_area_k{76800.0};

  bool operator==(const SensorModel &) const = default;
};

void validate(const SensorModel & s);

struct SensedTarget
{
  Detection detection;
  Point3 est_position;
  std::size_t target_index{0};   ///< ground truth, for diagnostics only
};

/// Planar bearing test: is `to` within the horizontal FOV of a camera at `pose`?
bool in_fov(const Pose6 & pose, const Vec2 & to, double fov);

class World
{
public:
  World(Scenario scenario, SensorModel sensor = {}, double speed = 1.0);

  const Scenario & scenario() const {return scenario_;}
  const SensorModel & sensor() const {return sensor_;}
  const Pose6 & robot_pose() const {return pose_;}
  double clock() const {return clock_;}
  double speed() const {return speed_;}
  std::uint64_t query_count() const {return queries_;}

  /// Obstacles followed by target footprints.
  std::vector<Polygon2> footprints() const;

  /// Oracle detector. Each call consumes one query slot of the seeded stream.
  std::vector<SensedTarget> sense(const Pose6 & pose);

  /// Features of one target facing the camera at `pose` and within range.
  std::vector<FeatureObservation> sense_features(const Pose6 & pose, std::size_t target_index) const;

  /// Moves along a straight segment; advances the clock by distance / speed.
  const Pose6 & step_to(const Pose6 & pose);

  bool segment_clear(const Point3 & a, const Point3 & b) const;
  /// Same test restricted to obstacles (targets ignored).
  bool obstacle_clear(const Point3 & a, const Point3 & b) const;
  bool in_bounds(const Point3 & p) const;
  bool point_free(const Point3 & p) const;

  /// Index of the target whose footprint centroid is nearest to p.
  std::size_t nearest_target(const Point3 & p) const;

private:
  Scenario scenario_;
  SensorModel sensor_;
  double speed_;
  Pose6 pose_;
  double clock_{0.0};
  std::uint64_t queries_{0};
};

}  // namespace lsg::sim

#endif  // LSG_WORLD_HPP
