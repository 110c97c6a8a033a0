#ifndef LSG_LEGS_HPP
#define LSG_LEGS_HPP

#include <vector>

#include "lsg/hplanner.hpp"
#include "lsg/vplanner.hpp"
#include "lsg/world.hpp"

namespace lsg::hp
{

/// Greedy shortcutting: keeps only vertices needed to stay collision free.
std::vector<Point3> shortcut(const sim::World & world, const std::vector<Point3> & path);

/**
 * \brief Straight segment when clear, else a shortcut grid path.
 * Throws vp::UnreachableError when neither yields a collision-free polyline.
 */
std::vector<Point3> refine_leg(const sim::World & world, const vp::OccupancyGrid & grid,
  const Point3 & from, const Point3 & to);

/// Binds refine_leg; both references must outlive the refiner.
LegRefiner world_refiner(const sim::World & world, const vp::OccupancyGrid & grid);

}  // namespace lsg::hp

#endif  // LSG_LEGS_HPP
