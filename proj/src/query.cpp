#include "lsg/query.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace lsg::hp
{

namespace
{

struct Token
{
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(const std::string & s)
{
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    if (i > start) {
      out.push_back({s.substr(start, i - start), start});
    }
  }
  return out;
}

bool keyword(const Token & t, const char * kw)
{
  const std::string k(kw);
  return t.text.size() == k.size() &&
         std::equal(k.begin(), k.end(), t.text.begin(), [](char a, char b) {
           return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
         });
}

const TargetNode & resolve_target(const Lsg & lsg, const std::string & name)
{
  for (const auto & t : lsg.target_graph().children()) {
    if ((t.inspected() && t.label == name) || t.display_name() == name) {
      return t;
    }
  }
  throw ResolutionError("target", "unknown target '" + name + "'");
}

const LevelNode & resolve_level(const TargetNode & t, const std::string & name)
{
  if (!t.inspected() || !t.level_graph) {
    throw ResolutionError("target", "target '" + t.display_name() + "' is not inspected");
  }
  for (const auto & l : t.level_graph->children()) {
    if (l.label() == name) {
      return l;
    }
  }
  throw ResolutionError("level", "unknown level '" + name + "' of " + t.label);
}

}  // namespace

QueryParseError::QueryParseError(const std::string & what, std::size_t position)
: std::runtime_error(what + " at position " + std::to_string(position)), position_(position)
{}

ResolutionError::ResolutionError(const std::string & tier, const std::string & what)
: std::runtime_error(tier + ": " + what), tier_(tier)
{}

SemanticQuery parse_query(const std::string & text)
{
  const std::vector<Token> tok = tokenize(text);
  if (tok.empty()) {
    throw QueryParseError("empty query", 0);
  }
  auto expect = [&](std::size_t i, const char * kw) {
      if (i >= tok.size()) {
        throw QueryParseError(std::string("expected '") + kw + "'", text.size());
      }
      if (!keyword(tok[i], kw)) {
        throw QueryParseError(std::string("expected '") + kw + "', found '" + tok[i].text + "'",
                tok[i].offset);
      }
    };
  auto label = [&](std::size_t i, const char * what) {
      if (i >= tok.size()) {
        throw QueryParseError(std::string("expected a ") + what + " label", text.size());
      }
      return tok[i].text;
    };
  auto finish = [&](std::size_t n) {
      if (tok.size() > n) {
        throw QueryParseError("unexpected '" + tok[n].text + "'", tok[n].offset);
      }
    };

  SemanticQuery q;
  if (keyword(tok[0], "return")) {
    expect(1, "to");
    expect(2, "base");
    finish(3);
    q.kind = SemanticQuery::Kind::ReturnToBase;
    return q;
  }
  expect(0, "visit");
  const std::string first = label(1, "target");
  if (tok.size() == 2) {
    q.kind = SemanticQuery::Kind::Target;
    q.target_label = first;
    return q;
  }
  if (keyword(tok[2], "of")) {
    q.kind = SemanticQuery::Kind::Level;
    q.level_label = first;
    q.target_label = label(3, "target");
    finish(4);
    return q;
  }
  expect(2, "in");
  q.kind = SemanticQuery::Kind::Feature;
  q.feature_label = first;
  q.level_label = label(3, "level");
  expect(4, "of");
  q.target_label = label(5, "target");
  finish(6);
  return q;
}

std::string format_query(const SemanticQuery & q)
{
  switch (q.kind) {
    case SemanticQuery::Kind::ReturnToBase:
      return "Return to Base";
    case SemanticQuery::Kind::Target:
      return "Visit " + q.target_label;
    case SemanticQuery::Kind::Level:
      return "Visit " + q.level_label + " of " + q.target_label;
    case SemanticQuery::Kind::Feature:
      break;
  }
  return "Visit " + q.feature_label + " in " + q.level_label + " of " + q.target_label;
}

TerminalSpec resolve_query(const Lsg & lsg, const SemanticQuery & q)
{
  if (q.kind == SemanticQuery::Kind::ReturnToBase) {
    return TerminalSpec{kRobotId, std::nullopt, std::nullopt};
  }
  const TargetNode & t = resolve_target(lsg, q.target_label);
  if (q.kind == SemanticQuery::Kind::Target) {
    return TerminalSpec{t.id, std::nullopt, std::nullopt};
  }
  const LevelNode & l = resolve_level(t, q.level_label);
  if (q.kind == SemanticQuery::Kind::Level) {
    return TerminalSpec{t.id, l.id, std::nullopt};
  }
  std::vector<std::pair<NodeId, NodeId>> by_class;   // (feature, parent pose)
  if (l.pose_graph) {
    for (const auto & p : l.pose_graph->children()) {
      if (!p.feature_graph) {
        continue;
      }
      for (const auto & f : p.feature_graph->children()) {
        if (f.label == q.feature_label) {
          return TerminalSpec{t.id, l.id, p.id};
        }
        if (f.class_label == q.feature_label) {
          by_class.emplace_back(f.id, p.id);
        }
      }
    }
  }
  if (by_class.size() == 1) {
    return TerminalSpec{t.id, l.id, by_class.front().second};
  }
  if (by_class.size() > 1) {
    throw ResolutionError("feature", "'" + q.feature_label + "' is ambiguous in " + l.label() +
            " of " + t.label + "; add a suffix index such as '" + q.feature_label + "-0'");
  }
  throw ResolutionError("feature", "unknown feature '" + q.feature_label + "' in " + l.label() +
          " of " + t.label);
}

}  // namespace lsg::hp
