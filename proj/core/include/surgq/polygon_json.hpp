#pragma once

// Polygon scene wire format:
//   {"width": W, "height": H,
//    "polygons": [{"class": 4, "vertices": [[x, y], ...]}, ...]}
// Optional per-polygon keys "section" (int) and "mode" ("separate" | "unioned").

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "surgq/geometry.hpp"

namespace surgq {

nlohmann::json to_json(const PolygonScene& scene);
nlohmann::json ring_to_json(const Ring& ring);

/// Throws ParseError carrying the JSON pointer of the first bad value. The
/// result is in paint order. `base` prefixes reported paths.
PolygonScene polygon_scene_from_json(const nlohmann::json& j, const std::string& base = "");

/// Ring of >= `min_points` finite [x, y] pairs.
Ring ring_from_json(const nlohmann::json& j, const std::string& path, std::size_t min_points = 3);

/// Integer >= 0. Parsed text yields unsigned numbers but values built in
/// code are usually signed, so both count.
inline bool is_index(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

}  // namespace surgq
