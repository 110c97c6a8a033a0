#include <doctest.h>

#include <functional>
#include <limits>
#include <random>

#include "lsg/dijkstra.hpp"
#include "lsg/lsg.hpp"

using namespace lsg;
using namespace lsg::hp;

namespace
{

NodeId id(std::uint64_t v) {return NodeId{v};}

// Exhaustive simple-path search; interior vertices must allow transit.
double enumerate_best(const PlanningGraph & g, std::size_t s, std::size_t t)
{
  const std::size_t n = g.order();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto & e : g.edges()) {
    adj[g.index_of(e.a)].push_back({g.index_of(e.b), e.weight});
    adj[g.index_of(e.b)].push_back({g.index_of(e.a), e.weight});
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> on(n, 0);
  std::function<void(std::size_t, double)> walk = [&](std::size_t u, double acc) {
      if (u == t) {
        best = std::min(best, acc);
        return;
      }
      if (u != s && !g.transit_allowed(u)) {
        return;
      }
      on[u] = 1;
      for (const auto & [v, w] : adj[u]) {
        if (!on[v]) {
          walk(v, acc + w);
        }
      }
      on[u] = 0;
    };
  walk(s, 0.0);
  return best;
}

}  // namespace

TEST_CASE("trivial and line graphs")
{
  PlanningGraph g;
  for (std::uint64_t i = 1; i <= 4; ++i) {
    g.add_node(id(i), {static_cast<double>(i), 0, 0});
  }
  g.add_edge(id(1), id(2), 1.0);
  g.add_edge(id(2), id(3), 2.0);
  g.add_edge(id(3), id(4), 3.0);
  const auto self = dijkstra(g, id(2), id(2));
  CHECK(self.nodes == std::vector<NodeId>{id(2)});
  CHECK(self.length == 0.0);
  const auto line = dijkstra(g, id(1), id(4));
  CHECK(line.nodes == std::vector<NodeId>{id(1), id(2), id(3), id(4)});
  CHECK(line.length == doctest::Approx(6.0));
  CHECK_THROWS_AS(dijkstra(g, id(1), id(9)), NoPathError);
  CHECK_THROWS(g.add_edge(id(1), id(3), -1.0));
  CHECK_THROWS(g.add_node(id(1), {}));
}

TEST_CASE("disconnected endpoints raise NoPathError")
{
  PlanningGraph g;
  g.add_node(id(1), {});
  g.add_node(id(2), {});
  try {
    dijkstra(g, id(1), id(2));
    FAIL("expected NoPathError");
  } catch (const NoPathError & e) {
    CHECK(e.src() == id(1));
    CHECK(e.dst() == id(2));
  }
}

TEST_CASE("no-transit nodes are only endpoints")
{
  PlanningGraph g;
  for (std::uint64_t i = 1; i <= 4; ++i) {
    g.add_node(id(i), {});
  }
  g.add_edge(id(1), id(2), 1.0);
  g.add_edge(id(2), id(3), 1.0);
  g.add_edge(id(1), id(4), 5.0);
  g.add_edge(id(4), id(3), 5.0);
  CHECK(dijkstra(g, id(1), id(3)).length == doctest::Approx(2.0));
  g.forbid_transit(id(2));
  CHECK(dijkstra(g, id(1), id(3)).nodes == std::vector<NodeId>{id(1), id(4), id(3)});
  CHECK(dijkstra(g, id(2), id(3)).length == doctest::Approx(1.0));
  CHECK(dijkstra(g, id(1), id(2)).length == doctest::Approx(1.0));
}

TEST_CASE("equal-cost ties prefer the smaller predecessor id")
{
  PlanningGraph g;
  for (std::uint64_t i : {1, 5, 3, 9}) {
    g.add_node(id(i), {});
  }
  g.add_edge(id(1), id(5), 1.0);
  g.add_edge(id(5), id(9), 1.0);
  g.add_edge(id(1), id(3), 1.0);
  g.add_edge(id(3), id(9), 1.0);
  CHECK(dijkstra(g, id(1), id(9)).nodes == std::vector<NodeId>{id(1), id(3), id(9)});
}

TEST_CASE("planning view of a local graph")
{
  LocalGraph<TargetNode> tg(ParentRef{kRobotId, {0, 0, 0}});
  TargetNode a;
  a.id = id(1);
  a.est_position = {3, 4, 0};
  tg.add_child(a);
  tg.add_edge(kRobotId, id(1), EdgeAttr{});
  const auto pg = planning_graph(tg);
  CHECK(pg.order() == 2);
  CHECK(dijkstra(pg, kRobotId, id(1)).length == doctest::Approx(5.0));
}

TEST_CASE("matches exhaustive enumeration on random graphs")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    PlanningGraph g;
    const std::uint64_t n = 2 + rng() % 7;
    for (std::uint64_t i = 0; i < n; ++i) {
      g.add_node(id(10 + i), {});
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t j = i + 1; j < n; ++j) {
        if (rng() % 3 == 0) {
          g.add_edge(id(10 + i), id(10 + j), rng() % 4 == 0 ? 1.0 : w(rng));
        }
      }
    }
    if (rng() % 2 == 0) {
      g.forbid_transit(id(10 + rng() % n));
    }
    const std::size_t s = rng() % n;
    const std::size_t t = rng() % n;
    const double expect = enumerate_best(g, s, t);
    if (!std::isfinite(expect)) {
      CHECK_THROWS_AS(dijkstra(g, id(10 + s), id(10 + t)), NoPathError);
      continue;
    }
    const auto r = dijkstra(g, id(10 + s), id(10 + t));
    CHECK(r.length == doctest::Approx(expect).epsilon(1e-12));
    REQUIRE(r.nodes.front() == id(10 + s));
    REQUIRE(r.nodes.back() == id(10 + t));
    for (std::size_t k = 1; k + 1 < r.nodes.size(); ++k) {
      CHECK(g.transit_allowed(g.index_of(r.nodes[k])));
    }
  }
}
