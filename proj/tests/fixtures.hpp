#ifndef LSG_TESTS_FIXTURES_HPP
#define LSG_TESTS_FIXTURES_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "lsg/lsg.hpp"

namespace fixtures
{

inline lsg::Detection detection(const std::string & cls, double conf = 0.8, double mask = 5000.0)
{
  lsg::Detection d;
  d.class_label = cls;
  d.confidence = conf;
  d.mask_area_px = mask;
  d.image_ref = "frame";
  return d;
}

/// Inspects `id` with `levels` rings of `n` poses at `radius` around its estimate.
/// Each pose sees one "panel" feature and every fourth pose a "bumper".
inline void inspect_ring(lsg::Lsg & g, lsg::NodeId id, int n, double radius, int levels = 1)
{
  using lsg::geometry::Point3;
  const Point3 c = g.find_target(id)->est_position;
  auto at = [&](int i, double z) {
      const double t = 2.0 * std::numbers::pi * i / n;
      return Point3{c.x + radius * std::cos(t), c.y + radius * std::sin(t), z};
    };
  g.begin_inspection(id);
  std::vector<Point3> ground;
  for (int k = 0; k < levels; ++k) {
    const double z = 2.0 * k;
    const Point3 first = at(0, z);
    const Point3 last = at(n - 1, z);
    const lsg::NodeId level = g.add_level(id, lsg::geometry::lerp(first, last, 0.5));
    for (int i = 0; i < n; ++i) {
      const Point3 p = at(i, z);
      const double yaw = std::atan2(c.y - p.y, c.x - p.x);
      const lsg::NodeId pose = g.add_pose(level, lsg::geometry::make_pose(p, yaw), "img");
      g.add_feature(pose, {"panel", {(p.x + c.x) / 2, (p.y + c.y) / 2, z + 0.5}, 0.9, 100.0});
      if (i % 4 == 0) {
        g.add_feature(pose, {"bumper", {(p.x + c.x) / 2, (p.y + c.y) / 2, z + 0.2}, 0.7, 50.0});
      }
      if (k == 0) {
        ground.push_back(p);
      }
    }
  }
  g.promote_to_inspected(id, lsg::geometry::convex_hull(ground));
}

/// Randomized graph exercising every layer, pruning and traversal edges.
inline lsg::Lsg random_lsg(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  lsg::Lsg g(lsg::geometry::make_pose({u(rng), u(rng), 0.0}, unit(rng) * 6.0));
  const int n = static_cast<int>(rng() % 8);
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += unit(rng);
    g.set_time(t);
    g.register_detected(detection(unit(rng) < 0.5 ? "car" : "truck", unit(rng),
      unit(rng) * 640 * 480), {u(rng), u(rng), 0.0});
  }
  g.prune_targets(5.0);
  std::vector<lsg::NodeId> ids;
  for (const auto * d : g.detected()) {
    ids.push_back(d->id);
  }
  for (lsg::NodeId id : ids) {
    if (unit(rng) < 0.5 && g.find_target(id)) {
      t += unit(rng);
      g.set_time(t);
      inspect_ring(g, id, 4 + static_cast<int>(rng() % 6), 2.0 + unit(rng),
        1 + static_cast<int>(rng() % 2));
    }
  }
  if (unit(rng) < 0.5) {
    for (const auto * d : g.detected()) {
      g.set_utility(d->id, unit(rng));
    }
  }
  g.refresh_traversal_edges(nullptr, 8.0);
  if (!g.detected().empty() && unit(rng) < 0.3) {
    // leave a staged inspection open
    const lsg::NodeId id = g.detected().front()->id;
    g.begin_inspection(id);
    const lsg::NodeId level = g.add_level(id, {0.0, 0.0, 0.0});
    g.add_pose(level, lsg::geometry::make_pose({1.0, 0.0, 0.0}, 0.0), "img");
  }
  return g;
}

}  // namespace fixtures

#endif  // LSG_TESTS_FIXTURES_HPP
