#include "lsg/legs.hpp"

namespace lsg::hp
{

std::vector<Point3> shortcut(const sim::World & world, const std::vector<Point3> & path)
{
  if (path.size() < 3) {
    return path;
  }
  std::vector<Point3> out{path.front()};
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = path.size() - 1;
    while (j > i + 1 && !world.segment_clear(path[i], path[j])) {
      --j;
    }
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

std::vector<Point3> refine_leg(const sim::World & world, const vp::OccupancyGrid & grid,
  const Point3 & from, const Point3 & to)
{
  if (world.segment_clear(from, to)) {
    return {from, to};
  }
  const vp::GridPlan plan = vp::plan_grid(grid, from, to);
  std::vector<Point3> path = shortcut(world, plan.path);
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!world.segment_clear(path[i - 1], path[i])) {
      throw vp::UnreachableError("grid path grazes a footprint");
    }
  }
  return path;
}

LegRefiner world_refiner(const sim::World & world, const vp::OccupancyGrid & grid)
{
  return [&world, &grid](const Point3 & a, const Point3 & b) {
           return refine_leg(world, grid, a, b);
         };
}

}  // namespace lsg::hp
