#include <doctest.h>

#include "fixtures.hpp"
#include "lsg/query.hpp"

using namespace lsg;
using namespace lsg::hp;
using Kind = SemanticQuery::Kind;

TEST_CASE("grammar forms")
{
  CHECK(parse_query("Visit front-bumper-1 in Level-0 of car-1") ==
    SemanticQuery{Kind::Feature, "front-bumper-1", "Level-0", "car-1"});
  CHECK(parse_query("visit Level-2 OF truck-0") ==
    SemanticQuery{Kind::Level, "", "Level-2", "truck-0"});
  CHECK(parse_query("  VISIT   Target-D-car-17 ") ==
    SemanticQuery{Kind::Target, "", "", "Target-D-car-17"});
  CHECK(parse_query("return to base").kind == Kind::ReturnToBase);
  CHECK(parse_query("Return To Base") == SemanticQuery{Kind::ReturnToBase, "", "", ""});
}

TEST_CASE("format round-trips")
{
  for (const SemanticQuery & q : {
      SemanticQuery{Kind::Feature, "hood-3", "Level-1", "car-0"},
      SemanticQuery{Kind::Level, "", "Level-0", "car-0"},
      SemanticQuery{Kind::Target, "", "", "truck-2"},
      SemanticQuery{Kind::ReturnToBase, "", "", ""}})
  {
    CHECK(parse_query(format_query(q)) == q);
  }
  CHECK(format_query({Kind::Level, "", "Level-0", "car-0"}) == "Visit Level-0 of car-0");
}

TEST_CASE("parse errors carry the offending offset")
{
  auto offset = [](const std::string & text) -> std::size_t {
      try {
        parse_query(text);
      } catch (const QueryParseError & e) {
        return e.position();
      }
      return std::string::npos;
    };
  CHECK(offset("") == 0);
  CHECK(offset("Fly to car-1") == 0);
  CHECK(offset("Visit") == 5);
  CHECK(offset("Visit hood-1 in Level-0") == 23);
  CHECK(offset("Visit hood-1 at car-0") == 13);
  CHECK(offset("Return to car-0") == 10);
  CHECK(offset("Return to base now") == 15);
  CHECK(offset("Visit Level-0 of car-0 extra") == 23);
}

TEST_CASE("resolution walks target, level, feature")
{
  Lsg g(geometry::make_pose({0, 0, 0}, 0.0));
  const NodeId a = g.register_detected(fixtures::detection("car"), {10, 0, 0});
  const NodeId b = g.register_detected(fixtures::detection("car"), {20, 0, 0});
  const NodeId d = g.register_detected(fixtures::detection("truck"), {-20, 0, 0});
  fixtures::inspect_ring(g, b, 8, 3.0, 2);
  fixtures::inspect_ring(g, a, 4, 3.0);
  REQUIRE(g.find_target(b)->label == "car-0");
  REQUIRE(g.find_target(a)->label == "car-1");

  const auto & b_levels = g.find_target(b)->level_graph->children();
  const TerminalSpec lvl = resolve_query(g, parse_query("Visit Level-1 of car-0"));
  CHECK(lvl == TerminalSpec{b, b_levels[1].id, std::nullopt});

  // "panel-5" in Level-1 hangs off the sixth pose of that level
  const TerminalSpec feat = resolve_query(g, parse_query("Visit panel-5 in Level-1 of car-0"));
  CHECK(feat.target == b);
  CHECK(feat.level == b_levels[1].id);
  CHECK(feat.pose == b_levels[1].pose_graph->children()[5].id);

  // a bare class label resolves only when unique in the level
  CHECK(resolve_query(g, parse_query("Visit bumper in Level-0 of car-1")).pose.has_value());
  try {
    resolve_query(g, parse_query("Visit bumper in Level-0 of car-0"));
    FAIL("expected ambiguity");
  } catch (const ResolutionError & e) {
    CHECK(e.tier() == "feature");
    CHECK(std::string(e.what()).find("ambiguous") != std::string::npos);
  }

  const std::string dname = g.find_target(d)->display_name();
  CHECK(dname == "Target-D-truck-" + to_string(d));
  CHECK(resolve_query(g, parse_query("Visit " + dname)) == TerminalSpec{d, std::nullopt, std::nullopt});
  CHECK(resolve_query(g, parse_query("Visit Target-I-car-1")).target == a);
  CHECK(resolve_query(g, parse_query("Return to Base")).target == kRobotId);

  auto tier = [&](const std::string & q) -> std::string {
      try {
        resolve_query(g, parse_query(q));
      } catch (const ResolutionError & e) {
        return e.tier();
      }
      return "";
    };
  CHECK(tier("Visit car-7") == "target");
  CHECK(tier("Visit Level-1 of car-1") == "level");
  CHECK(tier("Visit Level-0 of " + dname) == "target");
  CHECK(tier("Visit hood-0 in Level-0 of car-1") == "feature");
}
