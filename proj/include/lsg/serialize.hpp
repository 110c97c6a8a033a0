#ifndef LSG_SERIALIZE_HPP
#define LSG_SERIALIZE_HPP

/**
 * \file
 * \brief Versioned JSON documents for Lsg and its flattened union.
 *
 * Field names are documented in docs/formats.md. Numbers are written with
 * round-trip precision so deserialize(serialize(g)) == g holds exactly.
 */

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lsg/graph_union.hpp"
#include "lsg/lsg.hpp"

namespace lsg
{

inline constexpr int kLsgFormatVersion = 1;

/// Malformed document; the message carries the byte offset or JSON path.
class DocumentError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json_document(const Lsg & lsg);
Lsg from_json_document(const nlohmann::json & doc);

std::string serialize(const Lsg & lsg);
Lsg deserialize(std::string_view text);

nlohmann::json union_to_json(const FlatGraph & g);
FlatGraph union_from_json(const nlohmann::json & doc);

nlohmann::json point_to_json(const Point3 & p);
nlohmann::json pose_to_json(const Pose6 & p);

}  // namespace lsg

#endif  // LSG_SERIALIZE_HPP
