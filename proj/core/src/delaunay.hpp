#pragma once

// Bowyer-Watson Delaunay triangulation over integer lattice points with exact
// (128-bit) orientation and in-circle predicates.

#include <cstdint>
#include <span>
#include <vector>

namespace surgq::detail {

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const LatticePoint&) const = default;
};

struct Triangle {
  std::uint32_t a, b, c;  // counter-clockwise in a y-up frame, indices into the input
};

/// Input points must be distinct. Coordinates are expected within +-1e6.
std::vector<Triangle> delaunay(std::span<const LatticePoint> points);

}  // namespace surgq::detail
