#include "lsg/export.hpp"

#include <iomanip>
#include <sstream>
#include <string>

namespace lsg
{

namespace
{

const char * layer_color(LayerKind l)
{
  switch (l) {
    case LayerKind::Target: return "firebrick";
    case LayerKind::Level: return "darkorange";
    case LayerKind::Pose: return "steelblue";
    case LayerKind::Feature: return "forestgreen";
  }
  return "black";
}

const char * layer_shape(LayerKind l)
{
  switch (l) {
    case LayerKind::Target: return "box";
    case LayerKind::Level: return "hexagon";
    case LayerKind::Pose: return "ellipse";
    case LayerKind::Feature: return "diamond";
  }
  return "ellipse";
}

std::string escape_dot(const std::string & s)
{
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  return out;
}

std::string escape_xml(const std::string & s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt_point(const Point3 & p)
{
  std::ostringstream ss;
  ss << std::setprecision(6) << p.x << "," << p.y << "," << p.z;
  return ss.str();
}

}  // namespace

void write_dot(std::ostream & os, const FlatGraph & g)
{
  os << "graph lsg {\n";
  os << "  node [style=filled, fontcolor=white];\n";
  for (const auto & n : g.nodes) {
    os << "  n" << raw(n.id) << " [label=\"" << escape_dot(n.label) << "\", shape="
       << layer_shape(n.layer) << ", fillcolor=" << layer_color(n.layer) << ", layer=\""
       << to_string(n.layer) << "\"];\n";
  }
  for (const auto & e : g.edges) {
    os << "  n" << raw(e.a) << " -- n" << raw(e.b);
    if (e.attr.kind == EdgeKind::Weighted) {
      os << " [label=\"" << std::setprecision(4) << e.attr.weight << "\"]";
    } else {
      os << " [style=dashed]";
    }
    os << ";\n";
  }
  os << "}\n";
}

void write_graphml(std::ostream & os, const FlatGraph & g)
{
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <key id=\"layer\" for=\"node\" attr.name=\"layer\" attr.type=\"string\"/>\n"
     << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
     << "  <key id=\"position\" for=\"node\" attr.name=\"position\" attr.type=\"string\"/>\n"
     << "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
     << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"string\"/>\n"
     << "  <graph id=\"lsg\" edgedefault=\"undirected\">\n";
  for (const auto & n : g.nodes) {
    os << "    <node id=\"n" << raw(n.id) << "\">\n"
       << "      <data key=\"layer\">" << to_string(n.layer) << "</data>\n"
       << "      <data key=\"label\">" << escape_xml(n.label) << "</data>\n"
       << "      <data key=\"position\">" << fmt_point(n.position) << "</data>\n"
       << "    </node>\n";
  }
  std::size_t k = 0;
  for (const auto & e : g.edges) {
    os << "    <edge id=\"e" << k++ << "\" source=\"n" << raw(e.a) << "\" target=\"n" << raw(e.b)
       << "\">\n"
       << "      <data key=\"kind\">"
       << (e.attr.kind == EdgeKind::Weighted ? "weighted" : "symbolic") << "</data>\n";
    if (e.attr.kind == EdgeKind::Weighted) {
      os << "      <data key=\"weight\">" << std::setprecision(6) << e.attr.weight << "</data>\n";
    }
    os << "    </edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
}

}  // namespace lsg
