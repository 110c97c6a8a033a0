#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "lsg/geometry.hpp"

using namespace lsg::geometry;

namespace
{

// Winding number, independent of the ray-casting implementation.
int winding_number(const Vec2 & p, const std::vector<Vec2> & v)
{
  int wn = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % v.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) {
        ++wn;
      }
    } else if (b.y <= p.y && cross < 0) {
      --wn;
    }
  }
  return wn;
}

// Star-shaped polygon around the origin; angular gaps stay below pi so the
// ring is simple for n >= 4.
std::vector<Vec2> star_polygon(std::mt19937_64 & rng, int n)
{
  std::uniform_real_distribution<double> r(1.0, 5.0);
  std::uniform_real_distribution<double> jitter(0.0, 0.8);
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + jitter(rng)) / n;
    const double rad = r(rng);
    v.push_back({rad * std::cos(t), rad * std::sin(t)});
  }
  return v;
}

double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// O(n^3) hull: a point is a hull vertex when it is the endpoint of an edge
// with every other point strictly left or on the segment between the ends.
std::set<std::pair<double, double>> brute_hull(const std::vector<Vec2> & pts)
{
  std::set<std::pair<double, double>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j || pts[i] == pts[j]) {
        continue;
      }
      bool ok = true;
      for (std::size_t k = 0; k < pts.size() && ok; ++k) {
        const double c = cross(pts[i], pts[j], pts[k]);
        if (c < -1e-12) {
          ok = false;
        } else if (std::abs(c) <= 1e-12) {
          // collinear points must lie within the segment
          const double t = (pts[k].x - pts[i].x) * (pts[j].x - pts[i].x) +
            (pts[k].y - pts[i].y) * (pts[j].y - pts[i].y);
          const double len2 = std::pow(pts[j].x - pts[i].x, 2) + std::pow(pts[j].y - pts[i].y, 2);
          ok = t >= -1e-12 && t <= len2 + 1e-12;
        }
      }
      if (ok) {
        out.insert({pts[i].x, pts[i].y});
        out.insert({pts[j].x, pts[j].y});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("polygon construction normalizes winding and rejects bad rings")
{
  const Polygon2 cw = Polygon2::from_vertices({{0, 0}, {0, 2}, {3, 2}, {3, 0}});
  CHECK(signed_area(cw.vertices()) > 0);
  CHECK(cw.area() == doctest::Approx(6.0));
  CHECK(cw.perimeter() == doctest::Approx(10.0));
  CHECK(cw.centroid().x == doctest::Approx(1.5));
  CHECK(cw.is_convex());

  CHECK_THROWS_AS(Polygon2::from_vertices({{0, 0}, {1, 1}}), GeometryError);
  CHECK_THROWS_AS(Polygon2::from_vertices({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), GeometryError);
  CHECK_THROWS_AS(Polygon2::from_vertices({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
}

TEST_CASE("rotated rectangle keeps its area and centre")
{
  const Polygon2 r = Polygon2::rectangle({3, -1}, 4.5, 2.0, 0.7);
  CHECK(r.area() == doctest::Approx(9.0));
  CHECK(r.centroid().x == doctest::Approx(3.0));
  CHECK(r.centroid().y == doctest::Approx(-1.0));
}

TEST_CASE("point in polygon agrees with a winding-number oracle")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon2 poly = Polygon2::from_vertices(star_polygon(rng, 4 + trial % 9));
    for (int k = 0; k < 50; ++k) {
      const Vec2 p{u(rng), u(rng)};
      if (distance_to_boundary(p, poly) < 1e-6) {
        continue;
      }
      CHECK(point_in_polygon(p, poly) == (winding_number(p, poly.vertices()) != 0));
      ++checked;
    }
  }
  CHECK(checked > 9000);
}

TEST_CASE("boundary points count as inside")
{
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 2, 2);
  CHECK(point_in_polygon(Vec2{1.0, 0.3}, sq));
  CHECK(point_in_polygon(Vec2{1.0, 1.0}, sq));
  CHECK_FALSE(point_in_polygon(Vec2{1.0 + 1e-6, 0.0}, sq));
  CHECK(point_in_polygon(Point3{0.0, 0.0, 7.0}, sq));
}

TEST_CASE("convex hull matches the brute-force hull")
{
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grid(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 4 + trial % 20; ++i) {
      pts.push_back({static_cast<double>(grid(rng)), static_cast<double>(grid(rng))});
    }
    const auto expected = brute_hull(pts);
    if (expected.size() < 3) {
      CHECK_THROWS_AS(convex_hull(pts), GeometryError);
      continue;
    }
    // collinear boundary points are dropped by the hull, so compare corners
    const Polygon2 h = convex_hull(pts);
    CHECK(h.is_convex());
    for (const auto & v : h.vertices()) {
      CHECK(expected.count({v.x, v.y}) == 1);
    }
    for (const auto & p : pts) {
      CHECK(point_in_polygon(p, h));
    }
  }
}

TEST_CASE("segment predicates")
{
  CHECK(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  CHECK(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
  CHECK(point_segment_distance({1, 1}, {0, 0}, {2, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, {0, 0}, {2, 0}) == doctest::Approx(1.0));

  const Polygon2 sq = Polygon2::rectangle({0, 0}, 2, 2);
  CHECK(segment_intersects_polygon({-3, 0}, {3, 0}, sq));
  CHECK(segment_intersects_polygon({-0.5, 0}, {0.5, 0}, sq));
  CHECK_FALSE(segment_intersects_polygon({-3, 2}, {3, 2}, sq));
  CHECK(segment_intersects_polygon({-3, 1}, {3, 1}, sq));
}

TEST_CASE("dilated containment agrees with boundary distance")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  const Polygon2 poly = Polygon2::from_vertices(star_polygon(rng, 7));
  for (int k = 0; k < 2000; ++k) {
    const Vec2 p{u(rng), u(rng)};
    const double d = distance_to_boundary(p, poly);
    if (std::abs(d - 2.0) < 1e-6) {
      continue;
    }
    const bool expected = point_in_polygon(p, poly) || d < 2.0;
    CHECK(point_in_dilated_polygon(p, poly, 2.0) == expected);
  }
}

TEST_CASE("clipped area")
{
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 4, 4);
  CHECK(clipped_area(sq, {0, 0}, {1, 1}) == doctest::Approx(1.0));
  CHECK(clipped_area(sq, {1.5, 1.5}, {2.5, 2.5}) == doctest::Approx(0.25));
  CHECK(clipped_area(sq, {2, 0}, {3, 1}) == doctest::Approx(0.0));
  const Polygon2 tri = Polygon2::from_vertices({{0, 0}, {2, 0}, {0, 2}});
  CHECK(clipped_area(tri, {0, 0}, {1, 1}) == doctest::Approx(1.0));
  CHECK(clipped_area(tri, {1, 0}, {2, 1}) == doctest::Approx(0.5));
}

TEST_CASE("offset ring stays at the offset distance")
{
  const Polygon2 car = Polygon2::rectangle({6, 0}, 4.5, 2.0, 0.3);
  const OffsetRing ring(car, 2.0);
  const double expected = car.perimeter() + 2.0 * std::numbers::pi * 2.0;
  CHECK(ring.length() == doctest::Approx(expected).epsilon(0.01));
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = ring.at(ring.length() * i / 200.0);
    CHECK(distance_to_boundary(p, car) == doctest::Approx(2.0).epsilon(0.01));
    CHECK_FALSE(point_in_polygon(p, car));
  }
  const Vec2 q = ring.at(3.3);
  CHECK(planar_distance(ring.at(ring.project(q)), q) < 1e-6);
  CHECK(planar_distance(ring.at(ring.length() + 3.3), q) < 1e-9);
}

TEST_CASE("angles and poses")
{
  CHECK(normalize_angle(3 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(normalize_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  const Pose6 p = make_pose({1, 2, 3}, 7.0);
  CHECK(p.yaw == doctest::Approx(normalize_angle(7.0)));
  CHECK(euclidean({0, 0, 0}, {1, 2, 2}) == doctest::Approx(3.0));
  CHECK_FALSE(is_finite({0, NAN, 0}));
}
