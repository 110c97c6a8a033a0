#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lsg/world.hpp"

using namespace lsg;
using namespace lsg::sim;
using nlohmann::json;

namespace
{

json car_json(double x, double y, double yaw_deg = 0.0, double reliability = 1.0)
{
  return {
    {"class_label", "car"},
    {"footprint", {{"center", {x, y}}, {"length", 4.5}, {"width", 2.0}, {"yaw_deg", yaw_deg}}},
    {"height", 1.5}, {"reliability", reliability},
    {"features", {
      {{"class_label", "front-bumper"}, {"attach_local", {2.25, 0.0}}, {"height", 0.5}},
      {{"class_label", "left-door"}, {"attach_local", {0.0, 1.0}}, {"height", 1.0}},
      {{"class_label", "tailgate"}, {"attach_local", {-2.25, 0.0}}, {"height", 1.0}}}}};
}

json scenario_json(json targets, json obstacles = json::array())
{
  return {{"format", "lsg-scenario"}, {"version", 1}, {"name", "t"}, {"seed", 3},
    {"bounds", {{"min_x", -50}, {"min_y", -50}, {"max_x", 50}, {"max_y", 50}}},
    {"robot_start", {{"x", 0}, {"y", 0}, {"yaw_deg", 0}}},
    {"obstacles", obstacles}, {"targets", targets}};
}

json box(double x0, double x1, double y0, double y1)
{
  return {{"vertices", {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}};
}

}  // namespace

TEST_CASE("bundled scenarios load")
{
  const Scenario seven = load_scenario(std::string(LSG_DATA_DIR) + "/scenarios/seven_targets.json");
  CHECK(seven.targets.size() == 7);
  int silent = 0;
  for (const auto & t : seven.targets) {
    silent += t.reliability == 0.0 ? 1 : 0;
  }
  CHECK(silent == 1);
  const Scenario two = load_scenario(std::string(LSG_DATA_DIR) + "/scenarios/two_cars.json");
  CHECK(two.targets.size() == 2);
  CHECK(scenario_from_json(scenario_to_json(two)) == two);
}

TEST_CASE("scenario errors name the field")
{
  CHECK_THROWS_WITH_AS(scenario_from_json(scenario_json({car_json(5, 0), car_json(6, 0.5)})),
    doctest::Contains("overlap"), ScenarioError);
  json doc = scenario_json({car_json(5, 0)});
  doc["targets"][0].erase("class_label");
  CHECK_THROWS_WITH_AS(scenario_from_json(doc), doctest::Contains("targets/0/class_label"),
    ScenarioError);
  doc = scenario_json({car_json(5, 0)});
  doc["targets"][0]["reliability"] = 2.0;
  CHECK_THROWS_WITH_AS(scenario_from_json(doc), doctest::Contains("reliability"), ScenarioError);
  doc = scenario_json({car_json(0, 0)});
  CHECK_THROWS_WITH_AS(scenario_from_json(doc), doctest::Contains("robot_start"), ScenarioError);
  doc = scenario_json({car_json(5, 0)});
  doc["targets"][0]["features"][0]["attach_local"] = {1.0, 0.0};
  CHECK_THROWS_WITH_AS(scenario_from_json(doc), doctest::Contains("perimeter"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST_CASE("feature normals point out of the footprint")
{
  const Scenario s = scenario_from_json(scenario_json({car_json(5, 0, 90)}));
  const auto & f = s.targets[0].features;
  CHECK(f[0].normal.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(f[0].normal.y == doctest::Approx(1.0));
  CHECK(f[1].normal.x == doctest::Approx(-1.0));
  CHECK(f[2].normal.y == doctest::Approx(-1.0));
}

TEST_CASE("detector respects field of view, range and occlusion")
{
  World w(scenario_from_json(scenario_json({car_json(5, 0)})));
  const auto ahead = w.sense(geometry::make_pose({0, 0, 0}, 0.0));
  REQUIRE(ahead.size() == 1);
  CHECK(ahead[0].detection.class_label == "car");
  CHECK(geometry::planar_distance(ahead[0].est_position.xy(), {5, 0}) <= 0.3 + 1e-12);
  CHECK(ahead[0].detection.confidence == doctest::Approx(1.0 - 5.0 / 20.0));
  CHECK(w.sense(geometry::make_pose({0, 0, 0}, std::numbers::pi)).empty());
  CHECK(w.sense(geometry::make_pose({-20, 0, 0}, 0.0)).empty());
  CHECK_THROWS_AS(w.sense(geometry::make_pose({80, 0, 0}, 0.0)), OutOfBoundsError);

  World blocked(scenario_from_json(scenario_json({car_json(10, 0)}, {box(4, 5, -1, 1)})));
  CHECK(blocked.sense(geometry::make_pose({0, 0, 0}, 0.0)).empty());
  World hidden(scenario_from_json(scenario_json({car_json(5, 0), car_json(14, 0)})));
  CHECK(hidden.sense(geometry::make_pose({0, 0, 0}, 0.0)).size() == 1);
}

TEST_CASE("reliability zero is never detected")
{
  World w(scenario_from_json(scenario_json({car_json(5, 0, 0, 0.0)})));
  for (int i = 0; i < 100; ++i) {
    CHECK(w.sense(geometry::make_pose({0, 0, 0}, 0.0)).empty());
  }
  CHECK(w.query_count() == 100);
}

TEST_CASE("detections are deterministic for a seed")
{
  const Scenario s = scenario_from_json(scenario_json({car_json(5, 0, 0, 0.5), car_json(0, 8)}));
  World a(s);
  World b(s);
  for (int i = 0; i < 50; ++i) {
    const Pose6 p = geometry::make_pose({0, 0, 0}, 0.3 * i);
    const auto da = a.sense(p);
    const auto db = b.sense(p);
    REQUIRE(da.size() == db.size());
    for (std::size_t k = 0; k < da.size(); ++k) {
      CHECK(da[k].est_position == db[k].est_position);
      CHECK(da[k].detection == db[k].detection);
    }
  }
}

TEST_CASE("confidence and mask area do not increase with distance")
{
  double prev_conf = 2.0;
  double prev_mask = 1e18;
  for (double x = 3.0; x < 19.0; x += 0.5) {
    World w(scenario_from_json(scenario_json({car_json(x, 0)})));
    const auto d = w.sense(geometry::make_pose({0, 0, 0}, 0.0));
    REQUIRE(d.size() == 1);
    CHECK(d[0].detection.confidence <= prev_conf);
    CHECK(d[0].detection.mask_area_px <= prev_mask);
    prev_conf = d[0].detection.confidence;
    prev_mask = d[0].detection.mask_area_px;
  }
  // a 2 x 4.5 m car at 10 m covers a few percent of the frame
  World w(scenario_from_json(scenario_json({car_json(10, 0)})));
  const double frac = w.sense(geometry::make_pose({0, 0, 0}, 0.0))[0].detection.mask_area_px /
    (640.0 * 480.0);
  CHECK(frac == doctest::Approx(76800.0 * 9.0 / 100.0 / (640.0 * 480.0)));
}

TEST_CASE("features face the camera")
{
  World w(scenario_from_json(scenario_json({car_json(5, 0)})));
  // in front of the bumper, looking back at the car
  auto front = w.sense_features(geometry::make_pose({9.5, 0, 0}, std::numbers::pi), 0);
  REQUIRE(front.size() == 1);
  CHECK(front[0].class_label == "front-bumper");
  CHECK(front[0].position.z == doctest::Approx(0.5));
  // behind the car looking forward sees only the tailgate
  auto rear = w.sense_features(geometry::make_pose({0.5, 0, 0}, 0.0), 0);
  REQUIRE(rear.size() == 1);
  CHECK(rear[0].class_label == "tailgate");
  // right side: the left door faces away
  CHECK(w.sense_features(geometry::make_pose({5, -3, 0}, std::numbers::pi / 2), 0).empty());
}

TEST_CASE("a perimeter sweep sees every feature")
{
  const Scenario s = scenario_from_json(scenario_json({car_json(5, 0, 30)}));
  World w(s);
  const geometry::OffsetRing ring(s.targets[0].footprint, 2.0);
  std::set<std::string> seen;
  for (int i = 0; i < 40; ++i) {
    const geometry::Vec2 p = ring.at(ring.length() * i / 40);
    const geometry::Vec2 q = geometry::closest_boundary_point(p, s.targets[0].footprint);
    const double yaw = std::atan2(q.y - p.y, q.x - p.x);
    for (const auto & f : w.sense_features(geometry::make_pose({p.x, p.y, 0}, yaw), 0)) {
      seen.insert(f.class_label);
    }
  }
  CHECK(seen == std::set<std::string>{"front-bumper", "left-door", "tailgate"});
}

TEST_CASE("stepping advances the clock and detects collisions")
{
  World w(scenario_from_json(scenario_json({car_json(5, 0)})), {}, 2.0);
  w.step_to(geometry::make_pose({0, 0, 0}, 1.0));
  CHECK(w.clock() == 0.0);
  w.step_to(geometry::make_pose({0, 10, 0}, 0.0));
  CHECK(w.clock() == doctest::Approx(5.0));
  CHECK_THROWS_AS(w.step_to(geometry::make_pose({5, -10, 0}, 0.0)), CollisionError);
  CHECK_THROWS_AS(w.step_to(geometry::make_pose({0, 90, 0}, 0.0)), OutOfBoundsError);
  CHECK(w.robot_pose().position == Point3{0, 10, 0});
  CHECK(w.nearest_target({6, 1, 0}) == 0);
}

TEST_CASE("sensor model validation")
{
  SensorModel s;
  s.fov = 0.0;
  CHECK_THROWS(validate(s));
  s = {};
  s.max_range = -1.0;
  CHECK_THROWS(validate(s));
  CHECK(in_fov(geometry::make_pose({0, 0, 0}, 0.0), {1, 0.9}, std::numbers::pi / 2));
  CHECK_FALSE(in_fov(geometry::make_pose({0, 0, 0}, 0.0), {1, 1.1}, std::numbers::pi / 2));
}
