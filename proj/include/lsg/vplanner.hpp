#ifndef LSG_VPLANNER_HPP
#define LSG_VPLANNER_HPP

/**
 * \file
 * \brief Volumetric baseline: planar occupancy grid, risk inflation and a
 *        cost-weighted 8-connected shortest path search.
 */

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsg/geometry.hpp"

namespace lsg::sim
{
class World;
}

namespace lsg::vp
{

using geometry::Bounds2;
using geometry::Point3;
using geometry::Polygon2;
using geometry::Vec2;

class UnreachableError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class CellState : std::uint8_t { Free, Occupied, Risk };

struct Cell
{
  int x{0};
  int y{0};

  auto operator<=>(const Cell &) const = default;
};

class OccupancyGrid
{
public:
  OccupancyGrid() = default;
  OccupancyGrid(Vec2 origin, double cell_size, int nx, int ny);

  const Vec2 & origin() const {return origin_;}
  double cell_size() const {return cell_;}
  int nx() const {return nx_;}
  int ny() const {return ny_;}

  bool contains(Cell c) const {return c.x >= 0 && c.y >= 0 && c.x < nx_ && c.y < ny_;}
  CellState state(Cell c) const {return states_[index(c)];}
  void set(Cell c, CellState s) {states_[index(c)] = s;}
  /// Traversal cost multiplier; Occupied cells are not traversable.
  double multiplier(Cell c) const;
  double risk_multiplier() const {return risk_multiplier_;}
  void set_risk_multiplier(double m) {risk_multiplier_ = m;}

  /// Cell containing p; throws std::out_of_range outside the grid.
  Cell cell_of(const Vec2 & p) const;
  Vec2 center(Cell c) const;
  std::size_t count(CellState s) const;

  /// One text row per grid row, top row first: '.' free, '#' occupied, 'r' risk.
  std::string to_text() const;

  bool operator==(const OccupancyGrid &) const = default;

private:
  std::size_t index(Cell c) const
  {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(c.x);
  }

  Vec2 origin_;
  double cell_{0.8};
  int nx_{0};
  int ny_{0};
  double risk_multiplier_{2.0};
  std::vector<CellState> states_;
};

/// Cells overlapping any footprint with positive area become Occupied.
OccupancyGrid rasterize(const std::vector<Polygon2> & footprints, const Bounds2 & bounds,
  double cell_size = 0.8);
OccupancyGrid rasterize(const sim::World & world, double cell_size = 0.8);

/// Free cells within `risk_factor` cells (Chebyshev) of an Occupied cell become Risk.
OccupancyGrid inflate_risk(OccupancyGrid grid, int risk_factor = 2, double multiplier = 2.0);

struct GridPlan
{
  std::vector<Cell> cells;
  std::vector<Point3> path;   ///< start, interior cell centers, goal
  double cost{0.0};           ///< search cost under the multiplier model
  double length{0.0};         ///< meters along `path`
  double time_ms{0.0};
};

/**
 * \brief Minimum-cost 8-connected path. Step cost is the Euclidean step times
 *        the destination cell multiplier; diagonals may not cut an Occupied corner.
 */
GridPlan plan_grid(const OccupancyGrid & grid, const Point3 & start, const Point3 & goal);

/// 8-neighbourhood moves admitted from `c`, in a fixed order.
std::vector<Cell> grid_neighbors(const OccupancyGrid & grid, Cell c);

}  // namespace lsg::vp

#endif  // LSG_VPLANNER_HPP
