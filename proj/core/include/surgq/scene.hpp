#pragma once

// Value types for labeled surgical scenes: categorical class maps, section
// masks, fused scenes, and frame references. All are immutable once built.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surgq/error.hpp"

namespace surgq {

enum class ClassId : std::uint8_t {
  background = 0,
  abdominal_wall = 1,
  liver = 2,
  gi_tract = 3,
  fat = 4,
  tool = 5,
  blood = 6,
  connected_tissue = 7,
  gallbladder = 8,
};

inline constexpr int kClassCount = 9;

inline constexpr std::array<ClassId, kClassCount> kAllClasses = {
    ClassId::background, ClassId::abdominal_wall, ClassId::liver,
    ClassId::gi_tract,   ClassId::fat,            ClassId::tool,
    ClassId::blood,      ClassId::connected_tissue, ClassId::gallbladder};

constexpr int to_int(ClassId c) noexcept { return static_cast<int>(c); }

/// Throws InvalidClassId for anything outside [0, 8].
ClassId class_from_int(int value, std::size_t position = 0);

std::string_view class_name(ClassId c);

/// Accepts the display names returned by class_name(), case-insensitively.
std::optional<ClassId> class_from_name(std::string_view name);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Overlay palette. Values are a rendering convention, not part of any file format.
Rgb palette_color(ClassId c);

struct GridSize {
  int width = 0;
  int height = 0;
  bool operator==(const GridSize&) const = default;
};

/// Parses "80x45".
GridSize parse_grid(std::string_view text);

class ClassMap {
 public:
  /// Validates dimensions and every label; throws InvalidClassId / InvalidArgument.
  ClassMap(int width, int height, std::vector<std::uint8_t> labels);

  static ClassMap filled(int width, int height, ClassId c);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return labels_.size(); }

  ClassId at(int x, int y) const noexcept {
    return static_cast<ClassId>(labels_[static_cast<std::size_t>(y) * width_ + x]);
  }
  ClassId operator[](std::size_t i) const noexcept { return static_cast<ClassId>(labels_[i]); }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  bool operator==(const ClassMap&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> labels_;
};

/// Per-pixel section ids, contiguous in [0, N-1] with every id present.
class SectionMask {
 public:
  /// Throws NonContiguousSectionIds if some id in [0, max] never occurs.
  SectionMask(int width, int height, std::vector<std::uint16_t> sections);

  /// Importer path: arbitrary ids renumbered by first occurrence in row-major order.
  static SectionMask renumbered(int width, int height, std::span<const std::uint32_t> raw_ids);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return sections_.size(); }
  std::uint32_t section_count() const noexcept { return n_sections_; }

  std::uint16_t at(int x, int y) const noexcept {
    return sections_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint16_t operator[](std::size_t i) const noexcept { return sections_[i]; }
  std::span<const std::uint16_t> ids() const noexcept { return sections_; }

  bool operator==(const SectionMask&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint16_t> sections_;
  std::uint32_t n_sections_;
};

struct ValidatedPair {
  const ClassMap& class_map;
  const SectionMask& section_mask;
};

/// Both grids already satisfy their own invariants by construction; this
/// checks that they describe the same canvas.
ValidatedPair validate_pair(const ClassMap& class_map, const SectionMask& section_mask);

/// Center-sample downsampling: cell (i, j) takes the source pixel at
/// (floor((i + 0.5) * W / grid_w), floor((j + 0.5) * H / grid_h)).
ClassMap downsample(const ClassMap& map, int grid_w, int grid_h);
inline ClassMap downsample(const ClassMap& map, GridSize grid) {
  return downsample(map, grid.width, grid.height);
}

std::array<std::uint64_t, kClassCount> class_histogram(const ClassMap& map);

/// Inclusive pixel bounds.
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;
  bool operator==(const BoundingBox&) const = default;
};

struct SectionRecord {
  ClassId cls = ClassId::background;
  std::uint32_t pixel_count = 0;
  BoundingBox bounds;
  bool operator==(const SectionRecord&) const = default;
};

struct FusedScene {
  ClassMap class_map;
  SectionMask section_mask;
  std::vector<SectionRecord> sections;

  /// Builds the section table; throws ImpureSection if some section spans
  /// more than one class.
  static FusedScene assemble(ClassMap class_map, SectionMask section_mask);
};

/// Number of 4-adjacent section pairs that share a class. Zero for any
/// output of fuse().
std::size_t same_class_adjacent_pairs(const FusedScene& scene);

struct FrameRef {
  std::string video_id;
  std::int64_t frame_index = 0;
  std::int64_t timestamp_ms = 0;

  /// Stable string key "<video_id>:<frame_index>" used by the service.
  std::string key() const;

  bool operator==(const FrameRef&) const = default;
};

/// Ordering used by indexes and result tie-breaks: (video_id, frame_index).
inline bool frame_order_less(const FrameRef& a, const FrameRef& b) {
  if (a.video_id != b.video_id) return a.video_id < b.video_id;
  return a.frame_index < b.frame_index;
}

/// Throws InvalidArgument unless frame_index and timestamp_ms are both
/// strictly increasing within each video (input must already be in frame order).
void check_frame_sequence(std::span<const FrameRef> frames);

}  // namespace surgq
