#include "lsg/dijkstra.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace lsg::hp
{

NoPathError::NoPathError(NodeId src, NodeId dst)
: std::runtime_error("no path between nodes " + to_string(src) + " and " + to_string(dst)),
  src_(src), dst_(dst)
{}

void PlanningGraph::reserve(std::size_t nodes, std::size_t edges)
{
  ids_.reserve(nodes);
  positions_.reserve(nodes);
  no_transit_.reserve(nodes);
  sorted_.reserve(nodes);
  edges_.reserve(edges);
}

void PlanningGraph::add_node(NodeId id, const Point3 & position)
{
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(id, std::size_t{0}));
  if (it != sorted_.end() && it->first == id) {
    throw StructureError("duplicate planning node " + to_string(id));
  }
  sorted_.insert(it, {id, ids_.size()});
  ids_.push_back(id);
  positions_.push_back(position);
  no_transit_.push_back(0);
}

std::size_t PlanningGraph::index_of(NodeId id) const
{
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(id, std::size_t{0}));
  return it != sorted_.end() && it->first == id ? it->second : npos;
}

const Point3 & PlanningGraph::position(NodeId id) const
{
  const std::size_t i = index_of(id);
  if (i == npos) {
    throw StructureError("unknown planning node " + to_string(id));
  }
  return positions_[i];
}

void PlanningGraph::forbid_transit(NodeId id)
{
  const std::size_t i = index_of(id);
  if (i == npos) {
    throw StructureError("unknown planning node " + to_string(id));
  }
  no_transit_[i] = 1;
}

void PlanningGraph::add_edge(NodeId a, NodeId b, double weight)
{
  if (!contains(a) || !contains(b)) {
    throw StructureError("planning edge endpoint missing: " + to_string(a) + "-" + to_string(b));
  }
  if (!(weight >= 0.0)) {
    throw std::invalid_argument("planning edge weight must be non-negative");
  }
  edges_.push_back({a, b, weight});
}

PathResult dijkstra(const PlanningGraph & g, NodeId src, NodeId dst)
{
  const std::size_t s = g.index_of(src);
  const std::size_t t = g.index_of(dst);
  if (s == PlanningGraph::npos || t == PlanningGraph::npos) {
    throw NoPathError(src, dst);
  }
  const std::size_t n = g.order();
  // Compressed adjacency.
  std::vector<std::size_t> start(n + 1, 0);
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  ends.reserve(g.size());
  for (const auto & e : g.edges()) {
    const std::size_t a = g.index_of(e.a);
    const std::size_t b = g.index_of(e.b);
    ends.emplace_back(a, b);
    ++start[a + 1];
    ++start[b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    start[i + 1] += start[i];
  }
  std::vector<std::pair<std::size_t, double>> adj(start[n]);
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t k = 0; k < ends.size(); ++k) {
    const double w = g.edges()[k].weight;
    adj[fill[ends[k].first]++] = {ends[k].second, w};
    adj[fill[ends[k].second]++] = {ends[k].first, w};
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = PlanningGraph::npos;
  const auto & ids = g.ids();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> prev(n, kNone);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[s] = 0.0;
  open.emplace(0.0, s);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) {
      continue;
    }
    done[u] = 1;
    if (u == t) {
      break;
    }
    if (u != s && !g.transit_allowed(u)) {
      continue;
    }
    for (std::size_t k = start[u]; k < start[u + 1]; ++k) {
      const auto [v, w] = adj[k];
      if (done[v]) {
        continue;
      }
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        open.emplace(nd, v);
      } else if (nd == dist[v] && ids[u] < ids[prev[v]]) {
        prev[v] = u;
      }
    }
  }
  if (dist[t] == kInf) {
    throw NoPathError(src, dst);
  }
  PathResult r;
  r.length = dist[t];
  for (std::size_t v = t; ; v = prev[v]) {
    r.nodes.push_back(ids[v]);
    if (v == s) {
      break;
    }
  }
  std::reverse(r.nodes.begin(), r.nodes.end());
  return r;
}

}  // namespace lsg::hp
