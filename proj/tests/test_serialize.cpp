#include <doctest.h>

#include <cctype>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "lsg/export.hpp"
#include "lsg/graph_union.hpp"
#include "lsg/serialize.hpp"

using namespace lsg;

TEST_CASE("round trip preserves structure exactly")
{
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    const Lsg g = fixtures::random_lsg(rng);
    const std::string text = serialize(g);
    const Lsg back = deserialize(text);
    CHECK(back == g);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("malformed documents name the problem")
{
  CHECK_THROWS_WITH_AS(deserialize("{\"format\": \"lsg\", "), doctest::Contains("byte"),
    DocumentError);
  CHECK_THROWS_AS(deserialize("[]"), DocumentError);

  Lsg g;
  g.register_detected(fixtures::detection("car"), {1, 2, 0});
  nlohmann::json doc = to_json_document(g);
  doc["target_graph"]["nodes"][0]["detection"]["confidence"] = "high";
  try {
    from_json_document(doc);
    FAIL("expected a DocumentError");
  } catch (const DocumentError & e) {
    CHECK(std::string(e.what()).find("confidence") != std::string::npos);
  }

  doc = to_json_document(g);
  doc["version"] = 99;
  CHECK_THROWS_AS(from_json_document(doc), DocumentError);

  doc = to_json_document(g);
  doc["target_graph"]["edges"].push_back({{"a", 0}, {"b", 4242}, {"kind", "symbolic"}});
  CHECK_THROWS_AS(from_json_document(doc), DocumentError);
}

TEST_CASE("union documents round trip")
{
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const FlatGraph u = graph_union(fixtures::random_lsg(rng));
    const FlatGraph back = union_from_json(union_to_json(u));
    CHECK(back.nodes.size() == u.nodes.size());
    CHECK(back.edges.size() == u.edges.size());
    CHECK(union_to_json(back) == union_to_json(u));
  }
}

TEST_CASE("graph union merges parent copies")
{
  Lsg g;
  const NodeId a = g.register_detected(fixtures::detection("car"), {0, 0, 0});
  fixtures::inspect_ring(g, a, 4, 2.0);
  const FlatGraph u = graph_union(g);
  std::size_t order = 0;
  std::size_t size = 0;
  for (const auto & c : g.layer_metrics()) {
    order += c.order;
    size += c.size;
  }
  CHECK(u.nodes.size() == order - g.parent_copy_count());
  CHECK(u.edges.size() == size);
  CHECK(merge(u, u).nodes.size() == u.nodes.size());
}

TEST_CASE("dot and graphml exports list every merged node")
{
  Lsg fresh;
  std::ostringstream dot;
  write_dot(dot, graph_union(fresh));
  std::istringstream lines(dot.str());
  int node_lines = 0;
  for (std::string line; std::getline(lines, line); ) {
    node_lines += line.rfind("  n", 0) == 0 && line.size() > 3 && std::isdigit(static_cast<unsigned char>(line[3])) ? 1 : 0;
  }
  CHECK(node_lines == 1);

  Lsg g;
  const NodeId a = g.register_detected(fixtures::detection("car"), {0, 0, 0});
  fixtures::inspect_ring(g, a, 5, 2.0);
  const FlatGraph u = graph_union(g);
  std::ostringstream ml;
  write_graphml(ml, u);
  std::size_t nodes = 0;
  for (std::size_t pos = ml.str().find("<node "); pos != std::string::npos;
    pos = ml.str().find("<node ", pos + 1))
  {
    ++nodes;
  }
  CHECK(nodes == u.nodes.size());
}
