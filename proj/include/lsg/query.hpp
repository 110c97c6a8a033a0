#ifndef LSG_QUERY_HPP
#define LSG_QUERY_HPP

/**
 * \file
 * \brief Semantic navigation queries.
 *
 *     Visit <feature> in <level> of <target>
 *     Visit <level> of <target>
 *     Visit <target>
 *     Return to Base
 *
 * Keywords are case-insensitive; labels must match as registered. A target
 * may be named by its label ("car-1") or its display name ("Target-D-car-7").
 */

#include <cstddef>
#include <stdexcept>
#include <string>

#include "lsg/hplanner.hpp"

namespace lsg::hp
{

class QueryParseError : public std::runtime_error
{
public:
  QueryParseError(const std::string & what, std::size_t position);
  /// Zero-based character offset of the offending token.
  std::size_t position() const {return position_;}

private:
  std::size_t position_;
};

class ResolutionError : public std::runtime_error
{
public:
  ResolutionError(const std::string & tier, const std::string & what);
  /// "target", "level" or "feature".
  const std::string & tier() const {return tier_;}

private:
  std::string tier_;
};

struct SemanticQuery
{
  enum class Kind { Feature, Level, Target, ReturnToBase };

  Kind kind{Kind::Feature};
  std::string feature_label;
  std::string level_label;
  std::string target_label;

  bool operator==(const SemanticQuery &) const = default;
};

SemanticQuery parse_query(const std::string & text);
/// Canonical text form; parse_query(format_query(q)) == q.
std::string format_query(const SemanticQuery & q);

/// A feature terminal ends at the feature's parent pose.
TerminalSpec resolve_query(const Lsg & lsg, const SemanticQuery & q);

}  // namespace lsg::hp

#endif  // LSG_QUERY_HPP
