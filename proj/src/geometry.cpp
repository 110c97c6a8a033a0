#include "lsg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lsg::geometry
{

namespace
{

constexpr double kBoundaryEps = 1e-9;

double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  return point_segment_distance(p, a, b) <= kBoundaryEps;
}

int orientation(const Vec2 & a, const Vec2 & b, const Vec2 & c)
{
  const double v = cross(a, b, c);
  if (std::abs(v) <= 1e-12) {
    return 0;
  }
  return v > 0.0 ? 1 : -1;
}

}  // namespace

double normalize_angle(double a)
{
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

Pose6 make_pose(const Point3 & p, double yaw, double pitch, double roll)
{
  return Pose6{p, normalize_angle(yaw), normalize_angle(pitch), normalize_angle(roll)};
}

bool is_finite(const Point3 & p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

double euclidean(const Point3 & a, const Point3 & b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double planar_distance(const Vec2 & a, const Vec2 & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

Point3 lerp(const Point3 & a, const Point3 & b, double t)
{
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t};
}

double signed_area(std::span<const Vec2> ring)
{
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & a = ring[i];
    const Vec2 & b = ring[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

Polygon2 Polygon2::from_vertices(std::vector<Vec2> vertices)
{
  if (vertices.size() < 3) {
    throw GeometryError("polygon needs at least 3 vertices, got " +
            std::to_string(vertices.size()));
  }
  for (const auto & v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw GeometryError("polygon vertex is not finite");
    }
  }
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (planar_distance(vertices[i], vertices[(i + 1) % n]) <= kBoundaryEps) {
      throw GeometryError("polygon has repeated consecutive vertex at index " +
              std::to_string(i));
    }
  }
  const double area = signed_area(vertices);
  if (std::abs(area) <= 1e-12) {
    throw GeometryError("polygon has zero area");
  }
  // Non-adjacent edges must not touch.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
          vertices[(j + 1) % n]))
      {
        throw GeometryError("polygon is self-intersecting (edges " + std::to_string(i) +
                " and " + std::to_string(j) + ")");
      }
    }
  }
  if (area < 0.0) {
    std::reverse(vertices.begin(), vertices.end());
  }
  Polygon2 poly;
  poly.vertices_ = std::move(vertices);
  return poly;
}

Polygon2 Polygon2::rectangle(Vec2 center, double length_x, double length_y, double yaw)
{
  if (!(length_x > 0.0) || !(length_y > 0.0)) {
    throw GeometryError("rectangle dimensions must be positive");
  }
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hx = 0.5 * length_x;
  const double hy = 0.5 * length_y;
  std::vector<Vec2> v;
  for (const auto & [lx, ly] : {std::pair{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}) {
    v.push_back({center.x + c * lx - s * ly, center.y + s * lx + c * ly});
  }
  return from_vertices(std::move(v));
}

double Polygon2::area() const
{
  return std::abs(signed_area(vertices_));
}

double Polygon2::perimeter() const
{
  double acc = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    acc += planar_distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return acc;
}

Vec2 Polygon2::centroid() const
{
  double cx = 0.0;
  double cy = 0.0;
  double a2 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & p = vertices_[i];
    const Vec2 & q = vertices_[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

bool Polygon2::is_convex() const
{
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < -1e-12) {
      return false;
    }
  }
  return true;
}

bool point_in_polygon(const Point3 & p, const Polygon2 & poly)
{
  return point_in_polygon(p.xy(), poly);
}

bool point_in_polygon(const Vec2 & p, const Polygon2 & poly)
{
  const auto & v = poly.vertices();
  if (v.size() < 3) {
    throw GeometryError("point_in_polygon on malformed polygon");
  }
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(p, v[j], v[i])) {
      return true;
    }
    const bool crosses = (v[i].y > p.y) != (v[j].y > p.y);
    if (crosses) {
      const double x_at = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_at) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double point_segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

Vec2 closest_boundary_point(const Vec2 & p, const Polygon2 & poly)
{
  const auto & v = poly.vertices();
  Vec2 best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % v.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const Vec2 q{a.x + t * dx, a.y + t * dy};
    const double d = planar_distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

double distance_to_boundary(const Vec2 & p, const Polygon2 & poly)
{
  return planar_distance(p, closest_boundary_point(p, poly));
}

bool point_in_dilated_polygon(const Vec2 & p, const Polygon2 & poly, double margin)
{
  return point_in_polygon(p, poly) || distance_to_boundary(p, poly) <= margin;
}

Polygon2 convex_hull(std::span<const Point3> points)
{
  std::vector<Vec2> flat;
  flat.reserve(points.size());
  for (const auto & p : points) {
    flat.push_back(p.xy());
  }
  return convex_hull(std::span<const Vec2>(flat));
}

Polygon2 convex_hull(std::span<const Vec2> points)
{
  if (points.size() < 3) {
    throw GeometryError("convex hull needs at least 3 points");
  }
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec2 & a, const Vec2 & b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    throw GeometryError("convex hull input is degenerate (fewer than 3 distinct points)");
  }
  // Andrew's monotone chain; strict turns drop collinear points.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto & p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-12) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0; ) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    throw GeometryError("convex hull input is collinear");
  }
  return Polygon2::from_vertices(std::move(hull));
}

bool segments_intersect(const Vec2 & a, const Vec2 & b, const Vec2 & c, const Vec2 & d)
{
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  return (o1 == 0 && on_segment(c, a, b)) || (o2 == 0 && on_segment(d, a, b)) ||
         (o3 == 0 && on_segment(a, c, d)) || (o4 == 0 && on_segment(b, c, d));
}

bool segment_intersects_polygon(const Vec2 & a, const Vec2 & b, const Polygon2 & poly)
{
  if (point_in_polygon(a, poly) || point_in_polygon(b, poly)) {
    return true;
  }
  const auto & v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (segments_intersect(a, b, v[i], v[(i + 1) % v.size()])) {
      return true;
    }
  }
  return false;
}

double clipped_area(const Polygon2 & poly, const Vec2 & lo, const Vec2 & hi)
{
  // Sutherland-Hodgman against the four box half-planes.
  std::vector<Vec2> out(poly.vertices());
  auto clip = [&out](auto inside, auto intersect) {
      std::vector<Vec2> in;
      in.swap(out);
      for (std::size_t i = 0; i < in.size(); ++i) {
        const Vec2 & cur = in[i];
        const Vec2 & prev = in[(i + in.size() - 1) % in.size()];
        const bool cin = inside(cur);
        const bool pin = inside(prev);
        if (cin) {
          if (!pin) {
            out.push_back(intersect(prev, cur));
          }
          out.push_back(cur);
        } else if (pin) {
          out.push_back(intersect(prev, cur));
        }
      }
    };
  auto at_x = [](double x) {
      return [x](const Vec2 & p, const Vec2 & q) {
               const double t = (x - p.x) / (q.x - p.x);
               return Vec2{x, p.y + t * (q.y - p.y)};
             };
    };
  auto at_y = [](double y) {
      return [y](const Vec2 & p, const Vec2 & q) {
               const double t = (y - p.y) / (q.y - p.y);
               return Vec2{p.x + t * (q.x - p.x), y};
             };
    };
  clip([&](const Vec2 & p) {return p.x >= lo.x;}, at_x(lo.x));
  if (out.empty()) {return 0.0;}
  clip([&](const Vec2 & p) {return p.x <= hi.x;}, at_x(hi.x));
  if (out.empty()) {return 0.0;}
  clip([&](const Vec2 & p) {return p.y >= lo.y;}, at_y(lo.y));
  if (out.empty()) {return 0.0;}
  clip([&](const Vec2 & p) {return p.y <= hi.y;}, at_y(hi.y));
  if (out.size() < 3) {return 0.0;}
  return std::abs(signed_area(out));
}

OffsetRing::OffsetRing(const Polygon2 & convex, double offset, double max_arc_step)
{
  if (!convex.is_convex()) {
    throw GeometryError("offset ring requires a convex polygon");
  }
  if (!(offset > 0.0) || !(max_arc_step > 0.0)) {
    throw GeometryError("offset ring requires positive offset and arc step");
  }
  const auto & v = convex.vertices();
  const std::size_t n = v.size();
  auto normal = [&](std::size_t i) {
      const Vec2 & a = v[i];
      const Vec2 & b = v[(i + 1) % n];
      const double len = planar_distance(a, b);
      return Vec2{(b.y - a.y) / len, -(b.x - a.x) / len};
    };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 ni = normal(i);
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % n];
    points_.push_back({a.x + offset * ni.x, a.y + offset * ni.y});
    points_.push_back({b.x + offset * ni.x, b.y + offset * ni.y});
    // Rounded corner around b, sweeping CCW from ni to the next edge normal.
    const Vec2 nj = normal((i + 1) % n);
    const double a0 = std::atan2(ni.y, ni.x);
    double sweep = std::atan2(nj.y, nj.x) - a0;
    while (sweep < 0.0) {
      sweep += 2.0 * std::numbers::pi;
    }
    const int steps = static_cast<int>(std::ceil(sweep / max_arc_step));
    for (int k = 1; k < steps; ++k) {
      const double ang = a0 + sweep * k / steps;
      points_.push_back({b.x + offset * std::cos(ang), b.y + offset * std::sin(ang)});
    }
  }
  cumulative_.reserve(points_.size() + 1);
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    length_ += planar_distance(points_[i], points_[(i + 1) % points_.size()]);
    cumulative_.push_back(length_);
  }
}

Vec2 OffsetRing::at(double s) const
{
  s = std::fmod(s, length_);
  if (s < 0.0) {
    s += length_;
  }
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  seg = std::min(seg, points_.size() - 1);
  const Vec2 & a = points_[seg];
  const Vec2 & b = points_[(seg + 1) % points_.size()];
  const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
  const double t = seg_len > 0.0 ? (s - cumulative_[seg]) / seg_len : 0.0;
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

double OffsetRing::project(const Vec2 & p) const
{
  double best_s = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Vec2 & a = points_[i];
    const Vec2 & b = points_[(i + 1) % points_.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double t = len2 > 0.0 ?
      std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
    const double d = std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
    if (d < best_d) {
      best_d = d;
      best_s = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
    }
  }
  return best_s;
}

}  // namespace lsg::geometry
