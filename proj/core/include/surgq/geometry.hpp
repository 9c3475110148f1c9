#pragma once

// Editable component polygons derived from fused scenes, and the reverse
// direction: rasterizing an (edited) polygon scene into a reference class map.
//
// Coordinates are in source-image pixel space. Pixel (x, y) covers the unit
// square [x, x+1) x [y, y+1); its centre is (x + 0.5, y + 0.5).

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "surgq/scene.hpp"

namespace surgq {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Closed ring; the last -> first edge is implicit.
using Ring = std::vector<Point>;

enum class PieceMode { separate, unioned };

struct ComponentPolygon {
  ClassId cls = ClassId::background;
  Ring ring;
  std::optional<std::uint32_t> source_section;
  PieceMode mode = PieceMode::separate;

  bool operator==(const ComponentPolygon&) const = default;
};

/// Paint rank of the editable classes: Liver, Gallbladder, Fat, G.I. Tract,
/// Blood, Tool. Background, Abdominal Wall and Connected Tissue have none.
std::optional<int> z_rank(ClassId c);

struct PolygonScene {
  int width = 0;
  int height = 0;
  std::vector<ComponentPolygon> polygons;  // paint order

  bool operator==(const PolygonScene&) const = default;
};

/// Stable sort by z_rank; throws InvalidArgument for a class without a rank.
void sort_paint_order(PolygonScene& scene);

struct ExtractConfig {
  double epsilon = 2.0;
  double min_area_fraction = 0.001;
  int alpha_stride = 4;
  double alpha_radius = 8.0;
};

PolygonScene extract_polygons(const FusedScene& scene, const ExtractConfig& config = {});

/// Ramer-Douglas-Peucker on a closed ring. epsilon == 0 returns the input.
/// Throws DegenerateRing if fewer than 3 non-collinear vertices survive.
Ring simplify_ring(const Ring& ring, double epsilon);

/// Painter's algorithm with even-odd fill sampled at pixel centres. Uncovered
/// pixels are Background.
ClassMap rasterize(const PolygonScene& scene);

/// Even-odd coverage of one ring as a 0/1 mask.
std::vector<std::uint8_t> rasterize_ring(const Ring& ring, int width, int height);

/// Outer boundary (pixel-edge contour, holes ignored) of the 4-connected
/// component of `mask` containing (start_x, start_y). The start pixel must be
/// the first pixel of its component in row-major order.
Ring trace_outer_boundary(std::span<const std::uint8_t> mask, int width, int height, int start_x,
                          int start_y);

/// Unions every piece of a mask into one ring: alpha shape over boundary
/// samples, or the convex hull when the alpha complex leaves pieces apart.
Ring alpha_union(std::span<const std::uint8_t> mask, int width, int height, int stride, double radius);

Ring convex_hull(std::vector<Point> points);

double signed_area(const Ring& ring);
/// Area centroid; vertex mean for rings with zero area.
Point centroid(const Ring& ring);

struct Translate {
  double dx = 0.0;
  double dy = 0.0;
};
struct Scale {
  double sx = 1.0;
  double sy = 1.0;
};
struct Rotate {
  double degrees = 0.0;
};
struct MoveVertex {
  std::size_t index = 0;
  Point to;
};
using PolygonEdit = std::variant<Translate, Scale, Rotate, MoveVertex>;

/// Scale and rotate act about the ring centroid. Class and piece mode are kept.
ComponentPolygon transform_polygon(const ComponentPolygon& polygon, const PolygonEdit& edit);

}  // namespace surgq
