#include "surgq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delaunay.hpp"
#include "surgq/labeling.hpp"

namespace surgq {

namespace {

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  const double dx = p.x - (a.x + t * vx);
  const double dy = p.y - (a.y + t * vy);
  return std::hypot(dx, dy);
}

// Calls emit(y, x_begin, x_end) for each run of pixel centres inside the ring
// (even-odd rule), clipped to the canvas. x_end is exclusive.
template <typename Emit>
void scan_ring(const Ring& ring, int width, int height, Emit emit) {
  if (ring.size() < 3) return;
  double min_y = ring[0].y, max_y = ring[0].y;
  for (const auto& p : ring) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int y_begin = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int y_end = std::min(height - 1, static_cast<int>(std::ceil(max_y - 0.5)));
  std::vector<double> xs;
  const std::size_t n = ring.size();
  for (int y = y_begin; y <= y_end; ++y) {
    const double yc = y + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = ring[i];
      const Point& b = ring[(i + 1) % n];
      if ((a.y > yc) != (b.y > yc)) xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = std::ceil(xs[k] - 0.5);
      const double hi = std::ceil(xs[k + 1] - 0.5);
      const int x0 = static_cast<int>(std::clamp(lo, 0.0, static_cast<double>(width)));
      const int x1 = static_cast<int>(std::clamp(hi, 0.0, static_cast<double>(width)));
      if (x1 > x0) emit(y, x0, x1);
    }
  }
}

// Axis-aligned contour -> lattice points at unit spacing.
std::vector<detail::LatticePoint> unit_steps(const Ring& ring) {
  std::vector<detail::LatticePoint> out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ax = static_cast<std::int64_t>(ring[i].x), ay = static_cast<std::int64_t>(ring[i].y);
    const auto bx = static_cast<std::int64_t>(ring[(i + 1) % n].x);
    const auto by = static_cast<std::int64_t>(ring[(i + 1) % n].y);
    const std::int64_t sx = (bx > ax) - (bx < ax), sy = (by > ay) - (by < ay);
    for (std::int64_t x = ax, y = ay; x != bx || y != by; x += sx, y += sy) out.push_back({x, y});
  }
  return out;
}

Ring translated(Ring ring, double dx, double dy) {
  for (auto& p : ring) {
    p.x += dx;
    p.y += dy;
  }
  return ring;
}

struct Crop {
  int x0, y0, w, h;
  std::vector<std::uint8_t> mask;
};

Crop crop_sections(const FusedScene& scene, const std::vector<std::uint32_t>& ids) {
  BoundingBox box{scene.class_map.width(), scene.class_map.height(), -1, -1};
  std::vector<bool> wanted(scene.sections.size(), false);
  for (auto id : ids) {
    const auto& b = scene.sections[id].bounds;
    box.x0 = std::min(box.x0, b.x0);
    box.y0 = std::min(box.y0, b.y0);
    box.x1 = std::max(box.x1, b.x1);
    box.y1 = std::max(box.y1, b.y1);
    wanted[id] = true;
  }
  Crop c{box.x0, box.y0, box.x1 - box.x0 + 1, box.y1 - box.y0 + 1, {}};
  c.mask.assign(static_cast<std::size_t>(c.w) * c.h, 0);
  for (int y = 0; y < c.h; ++y) {
    for (int x = 0; x < c.w; ++x) {
      if (wanted[scene.section_mask.at(c.x0 + x, c.y0 + y)]) c.mask[static_cast<std::size_t>(y) * c.w + x] = 1;
    }
  }
  return c;
}

Ring largest_component_boundary(const std::vector<std::uint8_t>& mask, int w, int h) {
  const auto comps = label_foreground(mask, w, h);
  if (comps.count() == 0) return {};
  const auto best = static_cast<std::uint32_t>(
      std::max_element(comps.sizes.begin(), comps.sizes.end()) - comps.sizes.begin());
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    if (comps.labels[i] == best) {
      return trace_outer_boundary(mask, w, h, static_cast<int>(i % w), static_cast<int>(i / w));
    }
  }
  return {};
}

Ring simplify_or_keep(const Ring& ring, double epsilon) {
  try {
    return simplify_ring(ring, epsilon);
  } catch (const Error&) {
    return ring;
  }
}

}  // namespace

std::optional<int> z_rank(ClassId c) {
  switch (c) {
    case ClassId::liver: return 0;
    case ClassId::gallbladder: return 1;
    case ClassId::fat: return 2;
    case ClassId::gi_tract: return 3;
    case ClassId::blood: return 4;
    case ClassId::tool: return 5;
    default: return std::nullopt;
  }
}

void sort_paint_order(PolygonScene& scene) {
  for (const auto& p : scene.polygons) {
    if (!z_rank(p.cls)) {
      throw Error(Errc::invalid_argument,
                  std::string(class_name(p.cls)) + " is canvas backdrop, not an editable polygon");
    }
  }
  std::stable_sort(scene.polygons.begin(), scene.polygons.end(),
                   [](const ComponentPolygon& a, const ComponentPolygon& b) {
                     return *z_rank(a.cls) < *z_rank(b.cls);
                   });
}

Ring trace_outer_boundary(std::span<const std::uint8_t> mask, int width, int height, int start_x,
                          int start_y) {
  auto in = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < width && y < height && mask[static_cast<std::size_t>(y) * width + x] != 0;
  };
  if (!in(start_x, start_y)) return {};
  // Directions E, S, W, N in image coordinates (y down); the region stays on the right.
  constexpr int dx[4] = {1, 0, -1, 0};
  constexpr int dy[4] = {0, 1, 0, -1};
  // Offsets from the corner to the pixel ahead-right / ahead-left of each direction.
  constexpr int rx[4] = {0, -1, -1, 0}, ry[4] = {0, 0, -1, -1};
  constexpr int lx[4] = {0, 0, -1, -1}, ly[4] = {-1, 0, 0, -1};

  Ring ring{{static_cast<double>(start_x), static_cast<double>(start_y)}};
  int cx = start_x + 1, cy = start_y, d = 0;
  while (cx != start_x || cy != start_y) {
    const bool right = in(cx + rx[d], cy + ry[d]);
    const bool left = in(cx + lx[d], cy + ly[d]);
    // Diagonal contact does not connect: only follow 4-adjacent pixels.
    const int nd = !right ? (d + 1) % 4 : (left ? (d + 3) % 4 : d);
    if (nd != d) ring.push_back({static_cast<double>(cx), static_cast<double>(cy)});
    d = nd;
    cx += dx[d];
    cy += dy[d];
  }
  return ring;
}

Ring simplify_ring(const Ring& ring, double epsilon) {
  const std::size_t n = ring.size();
  if (n < 3) throw Error(Errc::degenerate_ring, "ring has " + std::to_string(n) + " vertices");
  if (epsilon <= 0.0) return ring;

  std::size_t far = 1;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::hypot(ring[i].x - ring[0].x, ring[i].y - ring[0].y);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  std::vector<bool> keep(n, false);
  keep[0] = keep[far] = true;
  // Spans [i, j] with j == n meaning vertex 0.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, far}, {far, n}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    const Point& a = ring[i];
    const Point& b = ring[j % n];
    double best = -1.0;
    std::size_t k_best = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double d = segment_distance(ring[k], a, b);
      if (d > best) {
        best = d;
        k_best = k;
      }
    }
    if (k_best != i && best > epsilon) {
      keep[k_best] = true;
      stack.emplace_back(i, k_best);
      stack.emplace_back(k_best, j);
    }
  }

  Ring out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(ring[i]);
  }
  if (out.size() < 3) {
    double best = 0.0;
    std::size_t k_best = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (keep[k]) continue;
      const double d = segment_distance(ring[k], out[0], out[1]);
      if (d > best) {
        best = d;
        k_best = k;
      }
    }
    if (k_best == n) throw Error(Errc::degenerate_ring, "all vertices are collinear");
    keep[k_best] = true;
    out.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i]) out.push_back(ring[i]);
    }
  }
  return out;
}

std::vector<std::uint8_t> rasterize_ring(const Ring& ring, int width, int height) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
  scan_ring(ring, width, height, [&](int y, int x0, int x1) {
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(y) * width + x0,
              mask.begin() + static_cast<std::ptrdiff_t>(y) * width + x1, 1);
  });
  return mask;
}

ClassMap rasterize(const PolygonScene& scene) {
  if (scene.width < 1 || scene.height < 1) throw Error(Errc::invalid_argument, "empty canvas");
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(scene.width) * scene.height,
                                   static_cast<std::uint8_t>(ClassId::background));
  for (const auto& poly : scene.polygons) {
    const auto value = static_cast<std::uint8_t>(poly.cls);
    scan_ring(poly.ring, scene.width, scene.height, [&](int y, int x0, int x1) {
      std::fill(labels.begin() + static_cast<std::ptrdiff_t>(y) * scene.width + x0,
                labels.begin() + static_cast<std::ptrdiff_t>(y) * scene.width + x1, value);
    });
  }
  return ClassMap(scene.width, scene.height, std::move(labels));
}

Ring convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  Ring hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Ring alpha_union(std::span<const std::uint8_t> mask, int width, int height, int stride, double radius) {
  if (stride < 1) throw Error(Errc::invalid_argument, "alpha sampling stride must be >= 1");
  const auto comps = label_foreground(mask, width, height);
  if (comps.count() == 0) return {};

  std::vector<Ring> contours(comps.count());
  for (std::size_t i = 0; i < comps.labels.size(); ++i) {
    const auto c = comps.labels[i];
    if (c != kNoComponent && contours[c].empty()) {
      contours[c] = trace_outer_boundary(mask, width, height, static_cast<int>(i % width),
                                         static_cast<int>(i / width));
    }
  }

  std::vector<detail::LatticePoint> samples;
  std::vector<std::uint32_t> piece_of;
  for (std::uint32_t c = 0; c < contours.size(); ++c) {
    const auto steps = unit_steps(contours[c]);
    for (std::size_t i = 0; i < steps.size(); i += static_cast<std::size_t>(stride)) {
      samples.push_back(steps[i]);
      piece_of.push_back(c);
    }
  }

  auto hull_fallback = [&] {
    std::vector<Point> all;
    for (const auto& r : contours) all.insert(all.end(), r.begin(), r.end());
    return convex_hull(std::move(all));
  };

  std::vector<detail::Triangle> kept;
  for (const auto& t : detail::delaunay(samples)) {
    const auto& a = samples[t.a];
    const auto& b = samples[t.b];
    const auto& c = samples[t.c];
    const double ab = std::hypot(double(a.x - b.x), double(a.y - b.y));
    const double bc = std::hypot(double(b.x - c.x), double(b.y - c.y));
    const double ca = std::hypot(double(c.x - a.x), double(c.y - a.y));
    const double twice_area =
        std::abs(double((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)));
    if (twice_area == 0.0) continue;
    if (ab * bc * ca / (2.0 * twice_area) <= radius) kept.push_back(t);
  }

  DisjointSet pieces(contours.size());
  for (const auto& t : kept) {
    pieces.unite(piece_of[t.a], piece_of[t.b]);
    pieces.unite(piece_of[t.b], piece_of[t.c]);
  }
  for (std::uint32_t c = 1; c < contours.size(); ++c) {
    if (pieces.find(c) != pieces.find(0)) return hull_fallback();
  }

  std::vector<std::uint8_t> filled(mask.begin(), mask.end());
  for (const auto& t : kept) {
    const Ring tri{{double(samples[t.a].x), double(samples[t.a].y)},
                   {double(samples[t.b].x), double(samples[t.b].y)},
                   {double(samples[t.c].x), double(samples[t.c].y)}};
    scan_ring(tri, width, height, [&](int y, int x0, int x1) {
      std::fill(filled.begin() + static_cast<std::ptrdiff_t>(y) * width + x0,
                filled.begin() + static_cast<std::ptrdiff_t>(y) * width + x1, 1);
    });
  }
  const auto merged = label_foreground(filled, width, height);
  if (merged.count() != 1) return hull_fallback();
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (filled[i]) {
      return trace_outer_boundary(filled, width, height, static_cast<int>(i % width),
                                  static_cast<int>(i / width));
    }
  }
  return {};
}

PolygonScene extract_polygons(const FusedScene& scene, const ExtractConfig& config) {
  const int w = scene.class_map.width();
  const int h = scene.class_map.height();
  PolygonScene out{w, h, {}};
  const auto min_area = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil(config.min_area_fraction * static_cast<double>(w) * h)));

  constexpr ClassId kOrder[] = {ClassId::liver, ClassId::gallbladder, ClassId::fat,
                                ClassId::gi_tract, ClassId::blood, ClassId::tool};
  for (ClassId cls : kOrder) {
    std::vector<std::uint32_t> ids;
    for (std::uint32_t s = 0; s < scene.sections.size(); ++s) {
      if (scene.sections[s].cls == cls && scene.sections[s].pixel_count >= min_area) ids.push_back(s);
    }
    if (ids.empty()) continue;

    if (cls == ClassId::liver || cls == ClassId::gallbladder) {
      const auto crop = crop_sections(scene, ids);
      auto ring = alpha_union(crop.mask, crop.w, crop.h, config.alpha_stride, config.alpha_radius);
      if (ring.size() < 3) continue;
      ring = simplify_or_keep(translated(std::move(ring), crop.x0, crop.y0), config.epsilon);
      out.polygons.push_back({cls, std::move(ring), std::nullopt, PieceMode::unioned});
      continue;
    }
    for (auto id : ids) {
      const auto crop = crop_sections(scene, {id});
      auto ring = largest_component_boundary(crop.mask, crop.w, crop.h);
      if (ring.size() < 3) continue;
      ring = simplify_or_keep(translated(std::move(ring), crop.x0, crop.y0), config.epsilon);
      out.polygons.push_back({cls, std::move(ring), id, PieceMode::separate});
    }
  }
  return out;
}

double signed_area(const Ring& ring) {
  if (ring.size() < 3) return 0.0;
  const Point o = ring[0];
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    acc += (ring[i].x - o.x) * (ring[i + 1].y - o.y) - (ring[i + 1].x - o.x) * (ring[i].y - o.y);
  }
  return acc / 2.0;
}

Point centroid(const Ring& ring) {
  if (ring.empty()) return {};
  const Point o = ring[0];
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
    const double x1 = ring[i].x - o.x, y1 = ring[i].y - o.y;
    const double x2 = ring[i + 1].x - o.x, y2 = ring[i + 1].y - o.y;
    const double cross = x1 * y2 - x2 * y1;
    a2 += cross;
    cx += (x1 + x2) * cross;
    cy += (y1 + y2) * cross;
  }
  if (std::abs(a2) < 1e-12) {
    Point mean;
    for (const auto& p : ring) {
      mean.x += p.x;
      mean.y += p.y;
    }
    return {mean.x / ring.size(), mean.y / ring.size()};
  }
  return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

ComponentPolygon transform_polygon(const ComponentPolygon& polygon, const PolygonEdit& edit) {
  if (polygon.ring.size() < 3) throw Error(Errc::degenerate_ring, "polygon has fewer than 3 vertices");
  ComponentPolygon out = polygon;
  auto& ring = out.ring;
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Translate>) {
          for (auto& p : ring) {
            p.x += op.dx;
            p.y += op.dy;
          }
        } else if constexpr (std::is_same_v<T, Scale>) {
          if (!(op.sx > 0.0) || !(op.sy > 0.0)) {
            throw Error(Errc::invalid_argument, "scale factors must be positive");
          }
          const Point c = centroid(polygon.ring);
          for (auto& p : ring) {
            p.x = c.x + (p.x - c.x) * op.sx;
            p.y = c.y + (p.y - c.y) * op.sy;
          }
        } else if constexpr (std::is_same_v<T, Rotate>) {
          const Point c = centroid(polygon.ring);
          const double rad = op.degrees * std::numbers::pi / 180.0;
          const double cs = std::cos(rad), sn = std::sin(rad);
          for (auto& p : ring) {
            const double x = p.x - c.x, y = p.y - c.y;
            p.x = c.x + x * cs - y * sn;
            p.y = c.y + x * sn + y * cs;
          }
        } else {
          if (op.index >= ring.size()) {
            throw Error(Errc::invalid_argument, "vertex " + std::to_string(op.index) + " out of range");
          }
          ring[op.index] = op.to;
          const auto& prev = ring[(op.index + ring.size() - 1) % ring.size()];
          const auto& next = ring[(op.index + 1) % ring.size()];
          auto coincide = [](const Point& a, const Point& b) {
            return std::hypot(a.x - b.x, a.y - b.y) < 1e-9;
          };
          if (coincide(op.to, prev) || coincide(op.to, next) || std::abs(signed_area(ring)) < 1e-9) {
            throw Error(Errc::degenerate_ring, "moving vertex " + std::to_string(op.index) +
                                                   " collapses the ring");
          }
        }
      },
      edit);
  return out;
}

}  // namespace surgq
