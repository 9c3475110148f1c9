#include "surgq/polygon_json.hpp"

#include <cmath>

namespace surgq {

using nlohmann::json;

json ring_to_json(const Ring& ring) {
  json out = json::array();
  for (const auto& p : ring) out.push_back({p.x, p.y});
  return out;
}

json to_json(const PolygonScene& scene) {
  json polys = json::array();
  for (const auto& p : scene.polygons) {
    json j{{"class", to_int(p.cls)},
           {"vertices", ring_to_json(p.ring)},
           {"mode", p.mode == PieceMode::unioned ? "unioned" : "separate"}};
    if (p.source_section) j["section"] = *p.source_section;
    polys.push_back(std::move(j));
  }
  return {{"width", scene.width}, {"height", scene.height}, {"polygons", std::move(polys)}};
}

Ring ring_from_json(const json& j, const std::string& path, std::size_t min_points) {
  if (!j.is_array()) throw ParseError(path, "expected an array of [x, y] points");
  if (j.size() < min_points) {
    throw ParseError(path, "expected at least " + std::to_string(min_points) + " points");
  }
  Ring ring;
  ring.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& v = j[i];
    const auto vpath = path + "/" + std::to_string(i);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ParseError(vpath, "expected [x, y]");
    }
    const Point p{v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParseError(vpath, "non-finite coordinate");
    ring.push_back(p);
  }
  return ring;
}

PolygonScene polygon_scene_from_json(const json& j, const std::string& base) {
  if (!j.is_object()) throw ParseError(base, "expected an object");
  auto dim = [&](const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 1) {
      throw ParseError(base + "/" + key, "expected a positive integer");
    }
    return static_cast<int>(it->get<long long>());
  };
  PolygonScene scene{dim("width"), dim("height"), {}};

  const auto polys = j.find("polygons");
  if (polys == j.end() || !polys->is_array()) throw ParseError(base + "/polygons", "expected an array");
  for (std::size_t i = 0; i < polys->size(); ++i) {
    const auto& pj = (*polys)[i];
    const auto ppath = base + "/polygons/" + std::to_string(i);
    if (!pj.is_object()) throw ParseError(ppath, "expected an object");

    const auto cls_it = pj.find("class");
    if (cls_it == pj.end() || !cls_it->is_number_integer()) {
      throw ParseError(ppath + "/class", "expected an integer class id");
    }
    const auto raw = cls_it->get<long long>();
    if (raw < 0 || raw >= kClassCount) throw ParseError(ppath + "/class", "class id out of range");
    const auto cls = static_cast<ClassId>(raw);
    if (!z_rank(cls)) throw ParseError(ppath + "/class", std::string(class_name(cls)) + " is not editable");

    const auto vit = pj.find("vertices");
    if (vit == pj.end()) throw ParseError(ppath + "/vertices", "missing");
    Ring ring = ring_from_json(*vit, ppath + "/vertices");
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const auto& p = ring[k];
      if (p.x < -0.5 * scene.width || p.x > 1.5 * scene.width || p.y < -0.5 * scene.height ||
          p.y > 1.5 * scene.height) {
        throw ParseError(ppath + "/vertices/" + std::to_string(k), "vertex too far outside the canvas");
      }
    }

    ComponentPolygon poly{cls, std::move(ring), std::nullopt, PieceMode::separate};
    if (const auto s = pj.find("section"); s != pj.end() && !s->is_null()) {
      if (!is_index(*s)) throw ParseError(ppath + "/section", "expected a section id");
      poly.source_section = s->get<std::uint32_t>();
    }
    if (const auto m = pj.find("mode"); m != pj.end()) {
      if (*m == "unioned") {
        poly.mode = PieceMode::unioned;
      } else if (*m != "separate") {
        throw ParseError(ppath + "/mode", "expected \"separate\" or \"unioned\"");
      }
    }
    scene.polygons.push_back(std::move(poly));
  }
  sort_paint_order(scene);
  return scene;
}

}  // namespace surgq
