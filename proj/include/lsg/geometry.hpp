#ifndef LSG_GEOMETRY_HPP
#define LSG_GEOMETRY_HPP

/**
 * \file
 * \brief Planar and 3D primitives shared by graph construction, simulation
 *        and planning.
 *
 * Containment is planar: the z component of a Point3 is ignored by every
 * polygon predicate in this header.
 */

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsg::geometry
{

/// Raised for malformed or degenerate input geometry.
class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Vec2
{
  double x{0.0};
  double y{0.0};

  bool operator==(const Vec2 &) const = default;
};

/// Position in meters.
struct Point3
{
  double x{0.0};
  double y{0.0};
  double z{0.0};

  bool operator==(const Point3 &) const = default;

  Vec2 xy() const {return {x, y};}
};

/// Position plus yaw/pitch/roll (radians, normalized to (-pi, pi]).
struct Pose6
{
  Point3 position;
  double yaw{0.0};
  double pitch{0.0};
  double roll{0.0};

  bool operator==(const Pose6 &) const = default;
};

/// Axis-aligned planar bounds.
struct Bounds2
{
  double min_x{0.0};
  double min_y{0.0};
  double max_x{0.0};
  double max_y{0.0};

  bool operator==(const Bounds2 &) const = default;

  bool contains(const Vec2 & p) const
  {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  double width() const {return max_x - min_x;}
  double height() const {return max_y - min_y;}
};

double normalize_angle(double a);
Pose6 make_pose(const Point3 & p, double yaw, double pitch = 0.0, double roll = 0.0);
bool is_finite(const Point3 & p);

double euclidean(const Point3 & a, const Point3 & b);
double planar_distance(const Vec2 & a, const Vec2 & b);
Point3 lerp(const Point3 & a, const Point3 & b, double t);

/**
 * \brief Simple polygon with counter-clockwise winding.
 *
 * Construction validates the vertex ring (at least three vertices, non-zero
 * area, no self intersections). Clockwise input is reversed so stored
 * vertices are always CCW.
 */
class Polygon2
{
public:
  Polygon2() = default;

  static Polygon2 from_vertices(std::vector<Vec2> vertices);
  static Polygon2 rectangle(Vec2 center, double length_x, double length_y, double yaw = 0.0);

  const std::vector<Vec2> & vertices() const {return vertices_;}
  std::size_t size() const {return vertices_.size();}
  bool empty() const {return vertices_.empty();}

  double area() const;
  double perimeter() const;
  Vec2 centroid() const;
  bool is_convex() const;

  bool operator==(const Polygon2 &) const = default;

private:
  std::vector<Vec2> vertices_;
};

double signed_area(std::span<const Vec2> ring);

/// True when (p.x, p.y) lies inside the polygon or on its boundary.
bool point_in_polygon(const Point3 & p, const Polygon2 & poly);
bool point_in_polygon(const Vec2 & p, const Polygon2 & poly);

/// Distance from p to the closest point of the polygon boundary.
double distance_to_boundary(const Vec2 & p, const Polygon2 & poly);
Vec2 closest_boundary_point(const Vec2 & p, const Polygon2 & poly);

/// Containment in the Minkowski sum of the polygon and a disk of radius margin.
bool point_in_dilated_polygon(const Vec2 & p, const Polygon2 & poly, double margin);

/// CCW convex hull of the (x, y) projections; collinear points are dropped.
Polygon2 convex_hull(std::span<const Point3> points);
Polygon2 convex_hull(std::span<const Vec2> points);

bool segments_intersect(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d);
double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b);

/// True when the closed segment a-b touches the polygon (boundary or interior).
bool segment_intersects_polygon(const Vec2 & a, const Vec2 & b, const Polygon2 & poly);

/// Area of poly clipped to the axis-aligned box [lo, hi].
double clipped_area(const Polygon2 & poly, const Vec2 & lo, const Vec2 & hi);

/**
 * \brief Closed polyline at a fixed outward offset from a convex polygon.
 *
 * Straight runs are parallel to the polygon edges; corners are rounded with
 * arcs discretized at no more than \p max_arc_step radians.
 */
class OffsetRing
{
public:
  OffsetRing(const Polygon2 & convex, double offset, double max_arc_step = 0.0872664626);

  double length() const {return length_;}
  /// Point at arc-length s (wraps modulo length()).
  Vec2 at(double s) const;
  /// Arc-length parameter of the ring point closest to p.
  double project(const Vec2 & p) const;
  const std::vector<Vec2> & points() const {return points_;}

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
  double length_{0.0};
};

}  // namespace lsg::geometry

#endif  // LSG_GEOMETRY_HPP
