#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lsg/vplanner.hpp"

using namespace lsg;
using namespace lsg::vp;

namespace
{

Polygon2 square(double x0, double y0, double side)
{
  return Polygon2::from_vertices({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

// Bellman-Ford over the cell graph with its own move rules.
double oracle_cost(const OccupancyGrid & g, Cell s, Cell t)
{
  const int n = g.nx() * g.ny();
  std::vector<double> d(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto at = [&](Cell c) -> double & {return d[static_cast<std::size_t>(c.y * g.nx() + c.x)];};
  auto blocked = [&](Cell c) {return !g.contains(c) || g.state(c) == CellState::Occupied;};
  at(s) = 0.0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int y = 0; y < g.ny(); ++y) {
      for (int x = 0; x < g.nx(); ++x) {
        const Cell c{x, y};
        if (blocked(c) || !std::isfinite(at(c))) {
          continue;
        }
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell nb{x + dx, y + dy};
            if ((dx == 0 && dy == 0) || blocked(nb)) {
              continue;
            }
            if (dx != 0 && dy != 0 && (blocked({x + dx, y}) || blocked({x, y + dy}))) {
              continue;
            }
            const double m = g.state(nb) == CellState::Risk ? g.risk_multiplier() : 1.0;
            const double step = (dx != 0 && dy != 0 ? std::numbers::sqrt2 : 1.0) * g.cell_size();
            if (at(c) + step * m < at(nb) - 1e-12) {
              at(nb) = at(c) + step * m;
              changed = true;
            }
          }
        }
      }
    }
    if (!changed) {
      break;
    }
  }
  return at(t);
}

}  // namespace

TEST_CASE("rasterize marks exactly the overlapped cells")
{
  const auto grid = rasterize({square(2, 2, 4)}, {0, 0, 10, 10}, 0.8);
  CHECK(grid.nx() == 13);
  CHECK(grid.count(CellState::Occupied) == 36);
  const auto aligned = rasterize({square(2, 2, 4)}, {0, 0, 10, 10}, 1.0);
  CHECK(aligned.count(CellState::Occupied) == 16);
  CHECK(aligned.state({1, 1}) == CellState::Free);
  CHECK(aligned.state({2, 2}) == CellState::Occupied);
  CHECK(aligned.state({6, 2}) == CellState::Free);
  const auto empty = rasterize({}, {0, 0, 10, 10}, 1.0);
  CHECK(empty.count(CellState::Free) == 100);
  CHECK_THROWS_AS(rasterize({}, {0, 0, 10, 10}, 0.0), std::invalid_argument);
}

TEST_CASE("risk inflation uses a Chebyshev neighbourhood")
{
  OccupancyGrid g({0, 0}, 1.0, 11, 11);
  g.set({5, 5}, CellState::Occupied);
  CHECK(inflate_risk(g, 2, 2.0).count(CellState::Risk) == 24);
  CHECK(inflate_risk(g, 1, 2.0).count(CellState::Risk) == 8);
  CHECK(inflate_risk(g, 0, 2.0).count(CellState::Risk) == 0);
  const auto once = inflate_risk(g, 2, 2.0);
  CHECK(inflate_risk(once, 2, 2.0) == once);
  CHECK(once.state({5, 5}) == CellState::Occupied);
  CHECK(once.multiplier({3, 3}) == 2.0);
  CHECK(once.multiplier({2, 2}) == 1.0);
  CHECK_THROWS(inflate_risk(g, -1, 2.0));
}

TEST_CASE("text rendering puts the top row first")
{
  OccupancyGrid g({0, 0}, 1.0, 3, 2);
  g.set({0, 1}, CellState::Occupied);
  g.set({2, 0}, CellState::Risk);
  CHECK(g.to_text() == "#..\n..r\n");
}

TEST_CASE("open corridor gives the straight line")
{
  const auto grid = rasterize({}, {0, 0, 10, 2}, 1.0);
  const auto plan = plan_grid(grid, {0.5, 0.5, 0}, {9.5, 0.5, 0});
  CHECK(plan.cells.size() == 10);
  CHECK(plan.cost == doctest::Approx(9.0));
  CHECK(plan.length == doctest::Approx(9.0));
  CHECK(plan.path.front() == Point3{0.5, 0.5, 0});
  CHECK(plan.path.back() == Point3{9.5, 0.5, 0});
}

TEST_CASE("risk-inflated obstacle fixture")
{
  const auto grid = inflate_risk(rasterize({square(4, 4, 1)}, {0, 0, 10, 10}, 1.0), 1, 2.0);
  REQUIRE(grid.count(CellState::Occupied) == 1);
  REQUIRE(grid.count(CellState::Risk) == 8);
  const auto plan = plan_grid(grid, {0.5, 4.5, 0}, {9.5, 4.5, 0});
  CHECK(plan.cost == doctest::Approx(10.65685424949238).epsilon(1e-12));
  for (const Cell & c : plan.cells) {
    CHECK(grid.state(c) == CellState::Free);
  }
}

TEST_CASE("no corner cutting between occupied cells")
{
  OccupancyGrid g({0, 0}, 1.0, 2, 2);
  g.set({1, 0}, CellState::Occupied);
  g.set({0, 1}, CellState::Occupied);
  CHECK(grid_neighbors(g, {0, 0}).empty());
  CHECK_THROWS_AS(plan_grid(g, {0.5, 0.5, 0}, {1.5, 1.5, 0}), UnreachableError);
  CHECK_THROWS_AS(plan_grid(g, {0.5, 0.5, 0}, {1.5, 0.5, 0}), UnreachableError);
  CHECK_THROWS_AS(plan_grid(g, {0.5, 0.5, 0}, {5.5, 0.5, 0}), UnreachableError);
}

TEST_CASE("grid search is optimal on small random grids")
{
  std::mt19937_64 rng(11);
  int reachable = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int nx = 2 + static_cast<int>(rng() % 5);
    const int ny = 2 + static_cast<int>(rng() % 5);
    OccupancyGrid g({0, 0}, 0.5, nx, ny);
    g.set_risk_multiplier(1.0 + static_cast<double>(rng() % 4));
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const auto r = rng() % 10;
        g.set({x, y}, r < 2 ? CellState::Occupied : r < 4 ? CellState::Risk : CellState::Free);
      }
    }
    const Cell s{0, 0};
    const Cell t{nx - 1, ny - 1};
    g.set(s, CellState::Free);
    g.set(t, CellState::Free);
    const double expect = oracle_cost(g, s, t);
    const Point3 ps{g.center(s).x, g.center(s).y, 0};
    const Point3 pt{g.center(t).x, g.center(t).y, 0};
    if (!std::isfinite(expect)) {
      CHECK_THROWS_AS(plan_grid(g, ps, pt), UnreachableError);
      continue;
    }
    ++reachable;
    const auto plan = plan_grid(g, ps, pt);
    CHECK(plan.cost == doctest::Approx(expect).epsilon(1e-12));
    double walked = 0.0;
    for (std::size_t k = 1; k < plan.cells.size(); ++k) {
      const Cell a = plan.cells[k - 1];
      const Cell b = plan.cells[k];
      REQUIRE(std::abs(a.x - b.x) <= 1);
      REQUIRE(std::abs(a.y - b.y) <= 1);
      walked += std::hypot(a.x - b.x, a.y - b.y) * 0.5 * g.multiplier(b);
    }
    CHECK(walked == doctest::Approx(plan.cost));
  }
  CHECK(reachable > 100);
}
