#pragma once

// 4-connected component labeling over label grids, backed by a union-find.

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "surgq/scene.hpp"

namespace surgq {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns true if the two sets were distinct.
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

struct ComponentLabels {
  int width = 0;
  int height = 0;
  /// Component id per pixel, numbered by first occurrence in row-major order.
  std::vector<std::uint32_t> labels;
  std::vector<std::uint32_t> sizes;

  std::uint32_t count() const noexcept { return static_cast<std::uint32_t>(sizes.size()); }
};

/// Components of equal-valued 4-connected pixels.
ComponentLabels label_regions(std::span<const std::uint8_t> grid, int width, int height);
ComponentLabels label_regions(std::span<const std::uint16_t> grid, int width, int height);

/// Components of nonzero pixels only; zero pixels get label UINT32_MAX.
ComponentLabels label_foreground(std::span<const std::uint8_t> mask, int width, int height);

inline constexpr std::uint32_t kNoComponent = 0xFFFFFFFFu;

/// Truth sections of a class map: each 4-connected same-class region.
SectionMask sections_from_components(const ClassMap& map);

}  // namespace surgq
