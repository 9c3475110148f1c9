#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "surgq/fusion.hpp"
#include "surgq/geometry.hpp"
#include "surgq/labeling.hpp"
#include "surgq/metrics.hpp"
#include "surgq/polygon_json.hpp"
#include "test_util.hpp"

namespace surgq {
namespace {

using nlohmann::json;

FusedScene scene_from(const ClassMap& cm) { return fuse(cm, sections_from_components(cm)); }

ClassMap paint(int w, int h, std::initializer_list<std::tuple<int, int, int, int, ClassId>> rects) {
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h, 0);
  for (const auto& [x0, y0, x1, y1, c] : rects)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) labels[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint8_t>(c);
  return ClassMap(w, h, std::move(labels));
}

Ring square(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

TEST(ExtractTest, SquareBecomesFourVertices) {
  const auto cm = paint(100, 80, {{30, 20, 70, 60, ClassId::fat}});
  const auto polys = extract_polygons(scene_from(cm));
  ASSERT_EQ(polys.polygons.size(), 1u);
  const auto& p = polys.polygons[0];
  EXPECT_EQ(p.cls, ClassId::fat);
  EXPECT_EQ(p.ring.size(), 4u);
  EXPECT_DOUBLE_EQ(std::abs(signed_area(p.ring)), 1600.0);
  EXPECT_EQ(rasterize(polys), cm);
}

TEST(ExtractTest, FragmentedLiverIsUnioned) {
  // A tool band cuts the liver in two.
  const auto cm = paint(120, 80, {{10, 10, 110, 60, ClassId::liver}, {55, 0, 65, 80, ClassId::tool}});
  const auto polys = extract_polygons(scene_from(cm));
  const auto livers = std::count_if(polys.polygons.begin(), polys.polygons.end(),
                                    [](const ComponentPolygon& p) { return p.cls == ClassId::liver; });
  ASSERT_EQ(livers, 1);
  const auto& liver = polys.polygons.front();
  EXPECT_EQ(liver.mode, PieceMode::unioned);
  double min_x = 1e9, max_x = -1e9;
  for (const auto& v : liver.ring) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
  }
  EXPECT_LE(min_x, 10.5);
  EXPECT_GE(max_x, 109.5);
  // The tool is painted over the union, so the round trip is still exact.
  EXPECT_EQ(rasterize(polys), cm);
}

TEST(ExtractTest, AbsentClassHasNoPolygon) {
  const auto cm = paint(60, 40, {{5, 5, 30, 30, ClassId::fat}});
  for (const auto& p : extract_polygons(scene_from(cm)).polygons) EXPECT_NE(p.cls, ClassId::blood);
  EXPECT_TRUE(extract_polygons(scene_from(ClassMap::filled(20, 10, ClassId::background))).polygons.empty());
}

TEST(ExtractTest, NonEditableClassesAreSkipped) {
  const auto cm = paint(60, 40, {{0, 0, 60, 10, ClassId::abdominal_wall}, {10, 15, 30, 35, ClassId::connected_tissue}});
  EXPECT_TRUE(extract_polygons(scene_from(cm)).polygons.empty());
}

TEST(SimplifyTest, TriangleUnchanged) {
  const Ring tri = {{0, 0}, {10, 0}, {0, 10}};
  EXPECT_EQ(simplify_ring(tri, 1.0), tri);
}

TEST(SimplifyTest, CollinearMidpointsDropped) {
  const Ring r = {{0, 0}, {5, 0}, {10, 0}, {10, 5}, {10, 10}, {5, 10}, {0, 10}, {0, 5}};
  const auto s = simplify_ring(r, 1.0);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(std::abs(signed_area(s)), 100.0);
}

TEST(SimplifyTest, ZeroEpsilonIsVerbatim) {
  const Ring r = {{0, 0}, {5, 0.1}, {10, 0}, {10, 10}, {0, 10}};
  EXPECT_EQ(simplify_ring(r, 0.0), r);
}

TEST(SimplifyTest, DegenerateRing) { EXPECT_ERRC(simplify_ring({{0, 0}, {1, 1}, {2, 2}}, 0.5), Errc::degenerate_ring); }

TEST(RasterizeTest, EmptySceneIsBackground) {
  EXPECT_EQ(rasterize(PolygonScene{30, 20, {}}), ClassMap::filled(30, 20, ClassId::background));
}

TEST(RasterizeTest, LaterPolygonsOverwrite) {
  PolygonScene s{40, 40, {}};
  s.polygons.push_back({ClassId::liver, square(0, 0, 20, 20), std::nullopt, PieceMode::separate});
  s.polygons.push_back({ClassId::fat, square(10, 10, 30, 30), std::nullopt, PieceMode::separate});
  const auto m = rasterize(s);
  EXPECT_EQ(m.at(5, 5), ClassId::liver);
  EXPECT_EQ(m.at(15, 15), ClassId::fat);
  EXPECT_EQ(m.at(25, 25), ClassId::fat);
  EXPECT_EQ(m.at(35, 35), ClassId::background);
  EXPECT_EQ(class_histogram(m)[to_int(ClassId::fat)], 400u);
}

TEST(RasterizeTest, OffCanvasIsClipped) {
  PolygonScene s{40, 30, {}};
  s.polygons.push_back({ClassId::tool, square(-30, -20, -5, -1), std::nullopt, PieceMode::separate});
  EXPECT_EQ(rasterize(s), ClassMap::filled(40, 30, ClassId::background));
  s.polygons.push_back({ClassId::tool, square(-10, -10, 10, 10), std::nullopt, PieceMode::separate});
  EXPECT_EQ(class_histogram(rasterize(s))[to_int(ClassId::tool)], 100u);
}

TEST(RasterizeTest, EvenOddFill) {
  // Self-overlapping ring: the doubly covered square is a hole.
  const Ring r = {{0, 0}, {20, 0}, {20, 20}, {0, 20}, {0, 0}, {5, 5}, {15, 5}, {15, 15}, {5, 15}, {5, 5}};
  const auto mask = rasterize_ring(r, 20, 20);
  EXPECT_EQ(mask[0], 1);
  EXPECT_EQ(mask[10 * 20 + 10], 0);
}

TEST(TransformTest, TranslateZeroIsIdentity) {
  const ComponentPolygon p{ClassId::fat, square(1, 2, 7, 9), 3u, PieceMode::separate};
  EXPECT_EQ(transform_polygon(p, Translate{0, 0}), p);
}

TEST(TransformTest, ScaleDoublesExtents) {
  const ComponentPolygon p{ClassId::fat, square(10, 10, 30, 20), std::nullopt, PieceMode::separate};
  const auto q = transform_polygon(p, Scale{2, 2});
  EXPECT_EQ(q.ring, square(0, 5, 40, 25));
}

TEST(TransformTest, FullTurnRestoresVertices) {
  const ComponentPolygon p{ClassId::tool, {{3, 4}, {50, 7}, {41, 33}, {8, 29}}, std::nullopt, PieceMode::separate};
  const auto q = transform_polygon(p, Rotate{360});
  for (std::size_t i = 0; i < p.ring.size(); ++i) {
    EXPECT_NEAR(q.ring[i].x, p.ring[i].x, 1e-6);
    EXPECT_NEAR(q.ring[i].y, p.ring[i].y, 1e-6);
  }
  const auto moved = transform_polygon(p, MoveVertex{2, {1, 1}});
  EXPECT_EQ(moved.ring[2], (Point{1, 1}));
  EXPECT_ERRC(transform_polygon(p, MoveVertex{9, {1, 1}}), Errc::invalid_argument);
}

TEST(PaintOrderTest, StableByRank) {
  PolygonScene s{10, 10, {}};
  s.polygons.push_back({ClassId::tool, square(0, 0, 1, 1), 1u, PieceMode::separate});
  s.polygons.push_back({ClassId::liver, square(0, 0, 1, 1), 2u, PieceMode::separate});
  s.polygons.push_back({ClassId::tool, square(0, 0, 1, 1), 3u, PieceMode::separate});
  sort_paint_order(s);
  EXPECT_EQ(s.polygons[0].cls, ClassId::liver);
  EXPECT_EQ(s.polygons[1].source_section, 1u);
  EXPECT_EQ(s.polygons[2].source_section, 3u);
  s.polygons.push_back({ClassId::background, square(0, 0, 1, 1), std::nullopt, PieceMode::separate});
  EXPECT_ERRC(sort_paint_order(s), Errc::invalid_argument);
}

TEST(PolygonJsonTest, RoundTrip) {
  PolygonScene s{854, 480, {}};
  s.polygons.push_back({ClassId::liver, {{0.5, 1.25}, {100, 3}, {50, 90.125}}, std::nullopt, PieceMode::unioned});
  s.polygons.push_back({ClassId::tool, square(-100, 400, 300, 700), 7u, PieceMode::separate});
  EXPECT_EQ(polygon_scene_from_json(json::parse(to_json(s).dump())), s);
}

TEST(PolygonJsonTest, ErrorsCarryPointer) {
  auto j = json::parse(R"({"width": 100, "height": 50,
      "polygons": [{"class": 4, "vertices": [[0,0],[10,0],[10,10]]},
                   {"class": 2, "vertices": [[0,0],[10,"x"],[10,10]]}]})");
  try {
    polygon_scene_from_json(j);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "/polygons/1/vertices/1");
  }
  j["polygons"][1]["vertices"][1] = {10, 500};  // beyond 1.5 x height
  try {
    polygon_scene_from_json(j);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "/polygons/1/vertices/1");
  }
  j["polygons"][1]["vertices"][1] = {10, 74};
  EXPECT_NO_THROW(polygon_scene_from_json(j));
  j["polygons"][0]["class"] = 0;
  try {
    polygon_scene_from_json(j);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "/polygons/0/class");
  }
}

TEST(PolygonJsonTest, ParsedSceneIsInPaintOrder) {
  const auto j = json::parse(R"({"width": 10, "height": 10,
      "polygons": [{"class": 5, "vertices": [[0,0],[5,0],[5,5]]},
                   {"class": 2, "vertices": [[0,0],[5,0],[5,5]]}]})");
  const auto s = polygon_scene_from_json(j);
  EXPECT_EQ(s.polygons[0].cls, ClassId::liver);
  EXPECT_EQ(s.polygons[1].cls, ClassId::tool);
}

TEST(RoundTripTest, SyntheticScenesStayAccurate) {
  auto spec = testing::small_spec(12, 5, 320, 180);
  const auto corpus = generate_synthetic(spec);
  for (const auto& f : corpus.frames) {
    const auto scene = fuse(f.truth, f.truth_sections);
    const auto back = rasterize(extract_polygons(scene));
    const auto counts = dice_counts(back, f.truth);
    for (int c = 1; c < kClassCount; ++c) {
      if (const auto d = counts[c].dice()) EXPECT_GE(*d, 0.9) << class_name(static_cast<ClassId>(c));
    }
  }
}

}  // namespace
}  // namespace surgq
