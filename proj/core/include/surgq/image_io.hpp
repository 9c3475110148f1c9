#pragma once

// PNG/JPEG codecs for class maps (8-bit gray), section masks (16-bit gray)
// and RGB frame stills.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "surgq/scene.hpp"

namespace surgq {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // interleaved RGB, row-major

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});

  Rgb pixel(int x, int y) const noexcept {
    const auto* p = &data[(static_cast<std::size_t>(y) * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void set_pixel(int x, int y, Rgb c) noexcept {
    auto* p = &data[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  bool operator==(const RgbImage&) const = default;
};

/// Paints each pixel with its class palette colour.
RgbImage render_class_map(const ClassMap& map);

/// Nearest-neighbour resize to the given width, preserving aspect ratio.
RgbImage resize_to_width(const RgbImage& image, int width);

using Bytes = std::vector<std::uint8_t>;

Bytes encode_class_map_png(const ClassMap& map);
ClassMap decode_class_map_png(std::span<const std::uint8_t> png);

Bytes encode_section_mask_png(const SectionMask& mask);
SectionMask decode_section_mask_png(std::span<const std::uint8_t> png);

Bytes encode_rgb_png(const RgbImage& image);
/// Gray, gray+alpha, palette and RGBA inputs are converted to 8-bit RGB.
RgbImage decode_rgb_png(std::span<const std::uint8_t> png);

/// Single-channel 8-bit mask (0 / 255 on write; any nonzero is set on read).
Bytes encode_mask_png(std::span<const std::uint8_t> mask, int width, int height);
std::vector<std::uint8_t> decode_mask_png(std::span<const std::uint8_t> png, int& width, int& height);

Bytes encode_jpeg(const RgbImage& image, int quality = 85);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
/// write-temp-then-rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

ClassMap read_class_map(const std::filesystem::path& path);
void write_class_map(const std::filesystem::path& path, const ClassMap& map);
SectionMask read_section_mask(const std::filesystem::path& path);
void write_section_mask(const std::filesystem::path& path, const SectionMask& mask);
RgbImage read_rgb(const std::filesystem::path& path);
void write_rgb(const std::filesystem::path& path, const RgbImage& image);

}  // namespace surgq
