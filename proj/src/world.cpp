#include "lsg/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace lsg::sim
{

using nlohmann::json;

namespace
{

bool polygons_overlap(const Polygon2 & a, const Polygon2 & b)
{
  const auto & va = a.vertices();
  const auto & vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (geometry::segments_intersect(va[i], va[(i + 1) % va.size()], vb[j],
          vb[(j + 1) % vb.size()]))
      {
        return true;
      }
    }
  }
  return geometry::point_in_polygon(va.front(), b) || geometry::point_in_polygon(vb.front(), a);
}

/// Outward normal of the footprint edge closest to p.
Vec2 surface_normal(const Polygon2 & poly, const Vec2 & p)
{
  const auto & v = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  Vec2 n{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % v.size()];
    const double d = geometry::point_segment_distance(p, a, b);
    if (d < best - 1e-12) {
      best = d;
      const double len = geometry::planar_distance(a, b);
      n = {(b.y - a.y) / len, -(b.x - a.x) / len};
    }
  }
  return n;
}

double uniform01(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

[[noreturn]] void field_error(const std::string & path, const std::string & what)
{
  throw ScenarioError("scenario field '" + path + "': " + what);
}

const json & field(const json & j, const char * key, const std::string & path)
{
  if (!j.is_object() || !j.contains(key)) {
    field_error(path + "/" + key, "missing");
  }
  return j.at(key);
}

double number(const json & j, const char * key, const std::string & path)
{
  const json & v = field(j, key, path);
  if (!v.is_number()) {
    field_error(path + "/" + key, "expected a number");
  }
  return v.get<double>();
}

double number_or(const json & j, const char * key, double fallback, const std::string & path)
{
  return j.contains(key) ? number(j, key, path) : fallback;
}

Vec2 vec2(const json & v, const std::string & path)
{
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    field_error(path, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

struct RectFrame
{
  Vec2 center;
  double yaw{0.0};

  Vec2 to_world(const Vec2 & local) const
  {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return {center.x + c * local.x - s * local.y, center.y + s * local.x + c * local.y};
  }
};

Polygon2 footprint_from(const json & j, const std::string & path, std::optional<RectFrame> * frame)
{
  try {
    if (j.contains("vertices")) {
      std::vector<Vec2> v;
      const json & arr = j.at("vertices");
      if (!arr.is_array()) {
        field_error(path + "/vertices", "expected an array");
      }
      for (std::size_t i = 0; i < arr.size(); ++i) {
        v.push_back(vec2(arr[i], path + "/vertices/" + std::to_string(i)));
      }
      return Polygon2::from_vertices(std::move(v));
    }
    const Vec2 c = vec2(field(j, "center", path), path + "/center");
    const double yaw = number_or(j, "yaw_deg", 0.0, path) * std::numbers::pi / 180.0;
    if (frame) {
      *frame = RectFrame{c, yaw};
    }
    return Polygon2::rectangle(c, number(j, "length", path), number(j, "width", path), yaw);
  } catch (const geometry::GeometryError & e) {
    field_error(path, e.what());
  }
}

}  // namespace

void validate(const Scenario & s)
{
  const Bounds2 & b = s.bounds;
  if (!(b.max_x > b.min_x) || !(b.max_y > b.min_y)) {
    throw ScenarioError("scenario field 'bounds': empty extent");
  }
  std::vector<const Polygon2 *> all;
  for (const auto & o : s.obstacles) {
    all.push_back(&o);
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    const TargetSpec & t = s.targets[i];
    const std::string path = "targets/" + std::to_string(i);
    if (!(t.reliability >= 0.0 && t.reliability <= 1.0)) {
      field_error(path + "/reliability", "must lie in [0, 1]");
    }
    if (!(t.height > 0.0)) {
      field_error(path + "/height", "must be positive");
    }
    if (t.class_label.empty()) {
      field_error(path + "/class_label", "must be non-empty");
    }
    for (std::size_t k = 0; k < t.features.size(); ++k) {
      const FeatureSpec & f = t.features[k];
      if (geometry::distance_to_boundary(f.attach, t.footprint) > 1e-6) {
        field_error(path + "/features/" + std::to_string(k) + "/attach",
          "attach point is not on the footprint perimeter");
      }
    }
    all.push_back(&t.footprint);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (const auto & v : all[i]->vertices()) {
      if (!b.contains(v)) {
        throw ScenarioError("scenario footprint " + std::to_string(i) + " leaves the bounds");
      }
    }
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (polygons_overlap(*all[i], *all[j])) {
        throw ScenarioError("scenario footprints " + std::to_string(i) + " and " +
                std::to_string(j) + " overlap");
      }
    }
    if (geometry::point_in_polygon(s.robot_start.position, *all[i])) {
      throw ScenarioError("scenario field 'robot_start': inside footprint " + std::to_string(i));
    }
  }
  if (!b.contains(s.robot_start.position.xy())) {
    throw ScenarioError("scenario field 'robot_start': outside bounds");
  }
}

Scenario scenario_from_json(const json & doc)
{
  Scenario s;
  if (!doc.is_object()) {
    throw ScenarioError("scenario document must be an object");
  }
  const json & fmt = field(doc, "format", "");
  if (!fmt.is_string() || fmt.get<std::string>() != "lsg-scenario") {
    field_error("/format", "expected \"lsg-scenario\"");
  }
  const json & ver = field(doc, "version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kScenarioFormatVersion) {
    field_error("/version", "unsupported version");
  }
  if (doc.contains("name")) {
    s.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("seed")) {
    const auto & seed = doc.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      field_error("/seed", "expected a non-negative integer");
    }
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  const json & b = field(doc, "bounds", "");
  s.bounds = {number(b, "min_x", "/bounds"), number(b, "min_y", "/bounds"),
    number(b, "max_x", "/bounds"), number(b, "max_y", "/bounds")};
  const json & rs = field(doc, "robot_start", "");
  s.robot_start = geometry::make_pose(
    {number(rs, "x", "/robot_start"), number(rs, "y", "/robot_start"),
      number_or(rs, "z", 0.0, "/robot_start")},
    number_or(rs, "yaw_deg", 0.0, "/robot_start") * std::numbers::pi / 180.0);

  if (doc.contains("obstacles")) {
    const json & obs = doc.at("obstacles");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      s.obstacles.push_back(footprint_from(obs[i], "/obstacles/" + std::to_string(i), nullptr));
    }
  }
  const json & targets = field(doc, "targets", "");
  if (!targets.is_array()) {
    field_error("/targets", "expected an array");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string path = "/targets/" + std::to_string(i);
    const json & t = targets[i];
    TargetSpec spec;
    const json & cl = field(t, "class_label", path);
    if (!cl.is_string()) {
      field_error(path + "/class_label", "expected a string");
    }
    spec.class_label = cl.get<std::string>();
    std::optional<RectFrame> frame;
    spec.footprint = footprint_from(field(t, "footprint", path), path + "/footprint", &frame);
    spec.height = number_or(t, "height", 1.5, path);
    spec.reliability = number_or(t, "reliability", 1.0, path);
    if (t.contains("features")) {
      const json & feats = t.at("features");
      for (std::size_t k = 0; k < feats.size(); ++k) {
        const std::string fpath = path + "/features/" + std::to_string(k);
        const json & f = feats[k];
        FeatureSpec fs;
        fs.class_label = field(f, "class_label", fpath).get<std::string>();
        if (f.contains("attach")) {
          fs.attach = vec2(f.at("attach"), fpath + "/attach");
        } else {
          if (!frame) {
            field_error(fpath + "/attach_local", "requires a rectangular footprint");
          }
          fs.attach = frame->to_world(vec2(field(f, "attach_local", fpath), fpath + "/attach_local"));
        }
        fs.height = number_or(f, "height", 0.5, fpath);
        fs.normal = surface_normal(spec.footprint, fs.attach);
        spec.features.push_back(std::move(fs));
      }
    }
    s.targets.push_back(std::move(spec));
  }
  validate(s);
  return s;
}

json scenario_to_json(const Scenario & s)
{
  auto poly = [](const Polygon2 & p) {
      json v = json::array();
      for (const auto & q : p.vertices()) {
        v.push_back({q.x, q.y});
      }
      return json{{"vertices", v}};
    };
  json obstacles = json::array();
  for (const auto & o : s.obstacles) {
    obstacles.push_back(poly(o));
  }
  json targets = json::array();
  for (const auto & t : s.targets) {
    json feats = json::array();
    for (const auto & f : t.features) {
      feats.push_back({{"class_label", f.class_label}, {"attach", {f.attach.x, f.attach.y}},
          {"height", f.height}});
    }
    targets.push_back({{"class_label", t.class_label}, {"footprint", poly(t.footprint)},
        {"height", t.height}, {"reliability", t.reliability}, {"features", feats}});
  }
  const Pose6 & r = s.robot_start;
  return {
    {"format", "lsg-scenario"}, {"version", kScenarioFormatVersion}, {"name", s.name},
    {"seed", s.seed},
    {"bounds", {{"min_x", s.bounds.min_x}, {"min_y", s.bounds.min_y},
      {"max_x", s.bounds.max_x}, {"max_y", s.bounds.max_y}}},
    {"robot_start", {{"x", r.position.x}, {"y", r.position.y}, {"z", r.position.z},
      {"yaw_deg", r.yaw * 180.0 / std::numbers::pi}}},
    {"obstacles", obstacles}, {"targets", targets}};
}

Scenario load_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ScenarioError("scenario " + path.string() + " is not valid JSON (byte " +
            std::to_string(e.byte) + ")");
  }
  return scenario_from_json(doc);
}

void validate(const SensorModel & s)
{
  if (!(s.fov > 0.0 && s.fov <= 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("sensor fov must lie in (0, 2*pi]");
  }
  if (!(s.max_range > 0.0)) {
    throw std::invalid_argument("sensor range must be positive");
  }
  if (s.image_w <= 0 || s.image_h <= 0 || !(s.mask_area_k > 0.0)) {
    throw std::invalid_argument("sensor image size and mask constant must be positive");
  }
}

bool in_fov(const Pose6 & pose, const Vec2 & to, double fov)
{
  const double dx = to.x - pose.position.x;
  const double dy = to.y - pose.position.y;
  if (std::hypot(dx, dy) < 1e-9) {
    return true;
  }
  const double bearing = geometry::normalize_angle(std::atan2(dy, dx) - pose.yaw);
  return std::abs(bearing) <= 0.5 * fov + 1e-12;
}

World::World(Scenario scenario, SensorModel sensor, double speed)
: scenario_(std::move(scenario)), sensor_(sensor), speed_(speed), pose_(scenario_.robot_start)
{
  validate(sensor_);
  if (!(speed_ > 0.0)) {
    throw std::invalid_argument("robot speed must be positive");
  }
}

std::vector<Polygon2> World::footprints() const
{
  std::vector<Polygon2> out = scenario_.obstacles;
  for (const auto & t : scenario_.targets) {
    out.push_back(t.footprint);
  }
  return out;
}

bool World::in_bounds(const Point3 & p) const
{
  return scenario_.bounds.contains(p.xy());
}

bool World::point_free(const Point3 & p) const
{
  return segment_clear(p, p);
}

bool World::segment_clear(const Point3 & a, const Point3 & b) const
{
  if (!obstacle_clear(a, b)) {
    return false;
  }
  return std::none_of(scenario_.targets.begin(), scenario_.targets.end(),
           [&](const TargetSpec & t) {
             return geometry::segment_intersects_polygon(a.xy(), b.xy(), t.footprint);
           });
}

bool World::obstacle_clear(const Point3 & a, const Point3 & b) const
{
  return std::none_of(scenario_.obstacles.begin(), scenario_.obstacles.end(),
           [&](const Polygon2 & o) {
             return geometry::segment_intersects_polygon(a.xy(), b.xy(), o);
           });
}

std::vector<SensedTarget> World::sense(const Pose6 & pose)
{
  if (!in_bounds(pose.position)) {
    throw OutOfBoundsError("sense pose outside world bounds");
  }
  const std::uint64_t query = queries_++;
  std::vector<SensedTarget> out;
  const Vec2 robot = pose.position.xy();
  for (std::size_t i = 0; i < scenario_.targets.size(); ++i) {
    const TargetSpec & t = scenario_.targets[i];
    const Vec2 c = t.footprint.centroid();
    const double d = geometry::planar_distance(robot, c);
    if (d > sensor_.max_range || !in_fov(pose, c, sensor_.fov)) {
      continue;
    }
    bool occluded = std::any_of(scenario_.obstacles.begin(), scenario_.obstacles.end(),
        [&](const Polygon2 & o) {return geometry::segment_intersects_polygon(robot, c, o);});
    for (std::size_t j = 0; j < scenario_.targets.size() && !occluded; ++j) {
      occluded = j != i &&
        geometry::segment_intersects_polygon(robot, c, scenario_.targets[j].footprint);
    }
    if (occluded) {
      continue;
    }
    std::seed_seq seq{
      static_cast<std::uint32_t>(scenario_.seed), static_cast<std::uint32_t>(scenario_.seed >> 32),
      static_cast<std::uint32_t>(query), static_cast<std::uint32_t>(query >> 32),
      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    if (!(uniform01(rng) < t.reliability)) {
      continue;
    }
    const double r = 0.3 * uniform01(rng);
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);

    SensedTarget st;
    st.target_index = i;
    st.est_position = {c.x + r * std::cos(theta), c.y + r * std::sin(theta), 0.0};
    Detection & det = st.detection;
    det.class_label = t.class_label;
    det.confidence = std::clamp(t.reliability * (1.0 - d / sensor_.max_range), 0.05, 1.0);
    const double frame = static_cast<double>(sensor_.image_w) * sensor_.image_h;
    const double dd = std::max(d, 0.1);
    det.mask_area_px = std::clamp(sensor_.mask_area_k * t.footprint.area() / (dd * dd), 0.0, frame);
    det.image_ref = "frame-" + std::to_string(query);
    det.image_w = sensor_.image_w;
    det.image_h = sensor_.image_h;
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<FeatureObservation> World::sense_features(const Pose6 & pose, std::size_t target_index) const
{
  std::vector<FeatureObservation> out;
  const TargetSpec & t = scenario_.targets.at(target_index);
  const Vec2 robot = pose.position.xy();
  const double frame = static_cast<double>(sensor_.image_w) * sensor_.image_h;
  for (const auto & f : t.features) {
    const Vec2 v{robot.x - f.attach.x, robot.y - f.attach.y};
    const double d = std::hypot(v.x, v.y);
    const bool facing = v.x * f.normal.x + v.y * f.normal.y > 0.0;
    if (!facing || d > sensor_.max_range || !in_fov(pose, f.attach, sensor_.fov)) {
      continue;
    }
    const double dd = std::max(d, 0.1);
    out.push_back({f.class_label, {f.attach.x, f.attach.y, f.height},
        std::clamp(1.0 - 0.5 * d / sensor_.max_range, 0.05, 1.0),
        std::clamp(sensor_.mask_area_k * 0.25 / (dd * dd), 0.0, frame)});
  }
  return out;
}

const Pose6 & World::step_to(const Pose6 & pose)
{
  if (!in_bounds(pose.position)) {
    throw OutOfBoundsError("step target outside world bounds");
  }
  if (!segment_clear(pose_.position, pose.position)) {
    std::ostringstream ss;
    ss << "collision moving from (" << pose_.position.x << ", " << pose_.position.y << ") to ("
       << pose.position.x << ", " << pose.position.y << ")";
    throw CollisionError(ss.str());
  }
  clock_ += geometry::euclidean(pose_.position, pose.position) / speed_;
  pose_ = pose;
  return pose_;
}

std::size_t World::nearest_target(const Point3 & p) const
{
  if (scenario_.targets.empty()) {
    throw std::out_of_range("world has no targets");
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenario_.targets.size(); ++i) {
    const double d = geometry::planar_distance(p.xy(), scenario_.targets[i].footprint.centroid());
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace lsg::sim
