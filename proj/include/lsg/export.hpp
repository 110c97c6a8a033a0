#ifndef LSG_EXPORT_HPP
#define LSG_EXPORT_HPP

#include <ostream>

#include "lsg/graph_union.hpp"

namespace lsg
{

/// Graphviz DOT of the flattened graph; node shape/colour encode the layer.
void write_dot(std::ostream & os, const FlatGraph & g);

/// GraphML of the flattened graph with attributes flattened to strings.
void write_graphml(std::ostream & os, const FlatGraph & g);

}  // namespace lsg

#endif  // LSG_EXPORT_HPP
