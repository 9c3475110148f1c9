#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surgq/image_io.hpp"
#include "surgq/quiz.hpp"

namespace surgq {

/// Pixel mask (1 = in region) of an anchor on a frame. Throws DanglingSection
/// for an unknown section and EmptyRegion when a ring covers no pixel.
std::vector<std::uint8_t> anchor_mask(const RegionAnchor& anchor, const FusedScene& scene);

/// Class used for the overlay colour: the section's class, or the most common
/// class under a ring.
ClassId anchor_class(const RegionAnchor& anchor, const FusedScene& scene);

struct Highlight {
  RgbImage image;
  /// Pixels the style may touch; everything else is bit-identical to the source.
  std::vector<std::uint8_t> footprint;
};

inline constexpr int kFillOpacityPercent = 40;
inline constexpr int kOutlineWidth = 2;

/// fill: 40% palette blend over the region. outline: opaque band of the
/// region's innermost 2 px. arrow: label box above the region plus a line
/// with a head ending at the region centroid.
Highlight render_highlight(const RgbImage& image, std::span<const std::uint8_t> region, ClassId cls,
                           HighlightStyle style);

Highlight render_highlight(const RgbImage& image, const FusedScene& scene, const RegionAnchor& anchor,
                           HighlightStyle style);

/// 0.6 * src + 0.4 * tint, rounded half up.
Rgb blend_fill(Rgb src, Rgb tint);

}  // namespace surgq
