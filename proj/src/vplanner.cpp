#include "lsg/vplanner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include "lsg/world.hpp"

namespace lsg::vp
{

OccupancyGrid::OccupancyGrid(Vec2 origin, double cell_size, int nx, int ny)
: origin_(origin), cell_(cell_size), nx_(nx), ny_(ny)
{
  if (!(cell_size > 0.0) || nx <= 0 || ny <= 0) {
    throw std::invalid_argument("grid needs a positive cell size and extent");
  }
  states_.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), CellState::Free);
}

double OccupancyGrid::multiplier(Cell c) const
{
  switch (state(c)) {
    case CellState::Free:
      return 1.0;
    case CellState::Risk:
      return risk_multiplier_;
    case CellState::Occupied:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

Cell OccupancyGrid::cell_of(const Vec2 & p) const
{
  const Cell c{static_cast<int>(std::floor((p.x - origin_.x) / cell_)),
    static_cast<int>(std::floor((p.y - origin_.y) / cell_))};
  // Points on the far boundary belong to the last row/column.
  const Cell clamped{c.x == nx_ ? nx_ - 1 : c.x, c.y == ny_ ? ny_ - 1 : c.y};
  if (!contains(clamped)) {
    throw std::out_of_range("point outside grid");
  }
  return clamped;
}

Vec2 OccupancyGrid::center(Cell c) const
{
  return {origin_.x + (c.x + 0.5) * cell_, origin_.y + (c.y + 0.5) * cell_};
}

std::size_t OccupancyGrid::count(CellState s) const
{
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), s));
}

std::string OccupancyGrid::to_text() const
{
  std::string out;
  out.reserve(static_cast<std::size_t>((nx_ + 1) * ny_));
  for (int y = ny_ - 1; y >= 0; --y) {
    for (int x = 0; x < nx_; ++x) {
      const CellState s = state({x, y});
      out += s == CellState::Free ? '.' : s == CellState::Occupied ? '#' : 'r';
    }
    out += '\n';
  }
  return out;
}

OccupancyGrid rasterize(const std::vector<Polygon2> & footprints, const Bounds2 & bounds,
  double cell_size)
{
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("cell size must be positive");
  }
  const int nx = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_size - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_size - 1e-9)));
  OccupancyGrid grid({bounds.min_x, bounds.min_y}, cell_size, nx, ny);
  constexpr double kAreaEps = 1e-9;
  for (const auto & poly : footprints) {
    double lo_x = std::numeric_limits<double>::infinity();
    double lo_y = lo_x;
    double hi_x = -lo_x;
    double hi_y = -lo_x;
    for (const auto & v : poly.vertices()) {
      lo_x = std::min(lo_x, v.x);
      lo_y = std::min(lo_y, v.y);
      hi_x = std::max(hi_x, v.x);
      hi_y = std::max(hi_y, v.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor((lo_x - bounds.min_x) / cell_size)));
    const int y0 = std::max(0, static_cast<int>(std::floor((lo_y - bounds.min_y) / cell_size)));
    const int x1 = std::min(nx - 1, static_cast<int>(std::floor((hi_x - bounds.min_x) / cell_size)));
    const int y1 = std::min(ny - 1, static_cast<int>(std::floor((hi_y - bounds.min_y) / cell_size)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 lo{bounds.min_x + x * cell_size, bounds.min_y + y * cell_size};
        const Vec2 hi{lo.x + cell_size, lo.y + cell_size};
        if (geometry::clipped_area(poly, lo, hi) > kAreaEps) {
          grid.set({x, y}, CellState::Occupied);
        }
      }
    }
  }
  return grid;
}

OccupancyGrid rasterize(const sim::World & world, double cell_size)
{
  return rasterize(world.footprints(), world.scenario().bounds, cell_size);
}

OccupancyGrid inflate_risk(OccupancyGrid grid, int risk_factor, double multiplier)
{
  if (risk_factor < 0 || !(multiplier >= 1.0)) {
    throw std::invalid_argument("risk factor must be >= 0 and multiplier >= 1");
  }
  grid.set_risk_multiplier(multiplier);
  std::vector<Cell> risk;
  for (int y = 0; y < grid.ny(); ++y) {
    for (int x = 0; x < grid.nx(); ++x) {
      if (grid.state({x, y}) != CellState::Free) {
        continue;
      }
      bool near = false;
      for (int dy = -risk_factor; dy <= risk_factor && !near; ++dy) {
        for (int dx = -risk_factor; dx <= risk_factor && !near; ++dx) {
          const Cell n{x + dx, y + dy};
          near = grid.contains(n) && grid.state(n) == CellState::Occupied;
        }
      }
      if (near) {
        risk.push_back({x, y});
      }
    }
  }
  for (const Cell & c : risk) {
    grid.set(c, CellState::Risk);
  }
  return grid;
}

std::vector<Cell> grid_neighbors(const OccupancyGrid & grid, Cell c)
{
  static constexpr int kMoves[8][2] = {
    {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  std::vector<Cell> out;
  out.reserve(8);
  auto blocked = [&](Cell n) {return !grid.contains(n) || grid.state(n) == CellState::Occupied;};
  for (const auto & m : kMoves) {
    const Cell n{c.x + m[0], c.y + m[1]};
    if (blocked(n)) {
      continue;
    }
    if (m[0] != 0 && m[1] != 0 &&
      (blocked({c.x + m[0], c.y}) || blocked({c.x, c.y + m[1]})))
    {
      continue;
    }
    out.push_back(n);
  }
  return out;
}

GridPlan plan_grid(const OccupancyGrid & grid, const Point3 & start, const Point3 & goal)
{
  const auto t0 = std::chrono::steady_clock::now();
  Cell s;
  Cell g;
  try {
    s = grid.cell_of(start.xy());
    g = grid.cell_of(goal.xy());
  } catch (const std::out_of_range &) {
    throw UnreachableError("start or goal outside the grid");
  }
  if (grid.state(s) == CellState::Occupied || grid.state(g) == CellState::Occupied) {
    throw UnreachableError("start or goal lies in an occupied cell");
  }

  const std::size_t n = static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny());
  auto idx = [&](Cell c) {
      return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(grid.nx()) +
             static_cast<std::size_t>(c.x);
    };
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(n, n);
  using Item = std::tuple<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[idx(s)] = 0.0;
  open.emplace(0.0, idx(s));
  const double h = grid.cell_size();
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) {
      continue;
    }
    if (i == idx(g)) {
      break;
    }
    const Cell c{static_cast<int>(i % static_cast<std::size_t>(grid.nx())),
      static_cast<int>(i / static_cast<std::size_t>(grid.nx()))};
    for (const Cell & nb : grid_neighbors(grid, c)) {
      const double step = (nb.x != c.x && nb.y != c.y) ? h * std::numbers::sqrt2 : h;
      const double nd = d + step * grid.multiplier(nb);
      const std::size_t j = idx(nb);
      if (nd < dist[j] || (nd == dist[j] && i < prev[j])) {
        const bool improved = nd < dist[j];
        dist[j] = nd;
        prev[j] = i;
        if (improved) {
          open.emplace(nd, j);
        }
      }
    }
  }
  if (!std::isfinite(dist[idx(g)])) {
    throw UnreachableError("no grid path between start and goal");
  }

  GridPlan plan;
  plan.cost = dist[idx(g)];
  for (std::size_t i = idx(g); ; i = prev[i]) {
    plan.cells.push_back({static_cast<int>(i % static_cast<std::size_t>(grid.nx())),
        static_cast<int>(i / static_cast<std::size_t>(grid.nx()))});
    if (i == idx(s)) {
      break;
    }
  }
  std::reverse(plan.cells.begin(), plan.cells.end());
  plan.path.push_back(start);
  for (std::size_t k = 1; k + 1 < plan.cells.size(); ++k) {
    const Vec2 c = grid.center(plan.cells[k]);
    const double t = static_cast<double>(k) / static_cast<double>(plan.cells.size() - 1);
    plan.path.push_back({c.x, c.y, start.z + t * (goal.z - start.z)});
  }
  plan.path.push_back(goal);
  for (std::size_t k = 1; k < plan.path.size(); ++k) {
    plan.length += geometry::euclidean(plan.path[k - 1], plan.path[k]);
  }
  plan.time_ms = std::chrono::duration<double, std::milli>(
    std::chrono::steady_clock::now() - t0).count();
  return plan;
}

}  // namespace lsg::vp
