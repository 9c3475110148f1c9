#include "surgq/highlight.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace surgq {

namespace {

constexpr int kLabelWidth = 40;
constexpr int kLabelHeight = 14;
constexpr int kLabelGap = 4;
constexpr double kHeadLength = 8.0;
constexpr double kHeadAngle = 0.5;  // radians

std::uint8_t blend(std::uint8_t s, std::uint8_t t) {
  return static_cast<std::uint8_t>((s * (100 - kFillOpacityPercent) + t * kFillOpacityPercent + 50) / 100);
}

// Keeps pixels whose whole 3x3 neighbourhood lies in `mask`; the image
// border counts as outside.
std::vector<std::uint8_t> erode(const std::vector<std::uint8_t>& mask, int w, int h) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask[static_cast<std::size_t>(y) * w + x]) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1 && keep; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask[static_cast<std::size_t>(ny) * w + nx]) keep = false;
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = keep;
    }
  }
  return out;
}

void draw_line(std::vector<std::uint8_t>& fp, int w, int h, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < w && y0 < h) fp[static_cast<std::size_t>(y0) * w + x0] = 1;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void check_region(const RgbImage& image, std::span<const std::uint8_t> region) {
  if (region.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw Error(Errc::dimension_mismatch, "region mask does not match the image");
  }
  if (std::none_of(region.begin(), region.end(), [](std::uint8_t v) { return v != 0; })) {
    throw Error(Errc::empty_region, "highlight region is empty");
  }
}

Error dangling(std::uint32_t id, const FusedScene& scene) {
  return Error(Errc::dangling_section, "section " + std::to_string(id) + " not in a frame with " +
                                           std::to_string(scene.sections.size()) + " sections");
}

}  // namespace

Rgb blend_fill(Rgb src, Rgb tint) { return {blend(src.r, tint.r), blend(src.g, tint.g), blend(src.b, tint.b)}; }

std::vector<std::uint8_t> anchor_mask(const RegionAnchor& anchor, const FusedScene& scene) {
  const int w = scene.class_map.width();
  const int h = scene.class_map.height();
  if (const auto* s = std::get_if<SectionAnchor>(&anchor)) {
    if (s->section >= scene.sections.size()) throw dangling(s->section, scene);
    std::vector<std::uint8_t> mask(scene.section_mask.size());
    const auto ids = scene.section_mask.ids();
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = ids[i] == s->section;
    return mask;
  }
  auto mask = rasterize_ring(std::get<Ring>(anchor), w, h);
  if (std::find(mask.begin(), mask.end(), 1) == mask.end()) throw Error(Errc::empty_region, "ring covers no pixel");
  return mask;
}

ClassId anchor_class(const RegionAnchor& anchor, const FusedScene& scene) {
  if (const auto* s = std::get_if<SectionAnchor>(&anchor)) {
    if (s->section >= scene.sections.size()) throw dangling(s->section, scene);
    return scene.sections[s->section].cls;
  }
  const auto mask = anchor_mask(anchor, scene);
  std::array<std::size_t, kClassCount> tally{};
  const auto labels = scene.class_map.labels();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) ++tally[labels[i]];
  }
  return static_cast<ClassId>(std::max_element(tally.begin(), tally.end()) - tally.begin());
}

Highlight render_highlight(const RgbImage& image, std::span<const std::uint8_t> region, ClassId cls,
                           HighlightStyle style) {
  check_region(image, region);
  const int w = image.width;
  const int h = image.height;
  const Rgb tint = palette_color(cls);
  Highlight out{image, std::vector<std::uint8_t>(region.size(), 0)};
  auto& fp = out.footprint;

  switch (style) {
    case HighlightStyle::fill: {
      for (std::size_t i = 0; i < region.size(); ++i) fp[i] = region[i] != 0;
      break;
    }
    case HighlightStyle::outline: {
      std::vector<std::uint8_t> inner(region.begin(), region.end());
      for (auto& v : inner) v = v != 0;
      const auto base = inner;
      for (int k = 0; k < kOutlineWidth; ++k) inner = erode(inner, w, h);
      for (std::size_t i = 0; i < fp.size(); ++i) fp[i] = base[i] && !inner[i];
      break;
    }
    case HighlightStyle::arrow: {
      int x0 = w;
      int y0 = h;
      double cx = 0;
      double cy = 0;
      std::size_t n = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!region[static_cast<std::size_t>(y) * w + x]) continue;
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          cx += x;
          cy += y;
          ++n;
        }
      }
      cx /= static_cast<double>(n);
      cy /= static_cast<double>(n);

      const int bw = std::min(kLabelWidth, w);
      const int bh = std::min(kLabelHeight, h);
      const int bx = std::clamp(x0, 0, w - bw);
      const int by = std::clamp(y0 - kLabelHeight - kLabelGap, 0, h - bh);
      for (int y = by; y < by + bh; ++y) {
        for (int x = bx; x < bx + bw; ++x) fp[static_cast<std::size_t>(y) * w + x] = 1;
      }
      const int tx = static_cast<int>(std::lround(cx));
      const int ty = static_cast<int>(std::lround(cy));
      const int sx = bx + bw / 2;
      const int sy = by + bh / 2;
      draw_line(fp, w, h, sx, sy, tx, ty);
      const double ang = std::atan2(sy - ty, sx - tx);
      if (sx != tx || sy != ty) {
        for (const double side : {-kHeadAngle, kHeadAngle}) {
          const int hx = static_cast<int>(std::lround(tx + kHeadLength * std::cos(ang + side)));
          const int hy = static_cast<int>(std::lround(ty + kHeadLength * std::sin(ang + side)));
          draw_line(fp, w, h, tx, ty, hx, hy);
        }
      }
      break;
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fp[static_cast<std::size_t>(y) * w + x]) continue;
      out.image.set_pixel(x, y, style == HighlightStyle::fill ? blend_fill(image.pixel(x, y), tint) : tint);
    }
  }
  return out;
}

Highlight render_highlight(const RgbImage& image, const FusedScene& scene, const RegionAnchor& anchor,
                           HighlightStyle style) {
  if (image.width != scene.class_map.width() || image.height != scene.class_map.height()) {
    throw Error(Errc::dimension_mismatch, "frame image does not match its scene");
  }
  return render_highlight(image, anchor_mask(anchor, scene), anchor_class(anchor, scene), style);
}

}  // namespace surgq
