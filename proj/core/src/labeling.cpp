#include "surgq/labeling.hpp"

#include <limits>

namespace surgq {

namespace {

// Two-pass labeling; `same(a, b)` decides whether neighbouring cells join and
// `active(i)` whether a cell is labeled at all.
template <typename Same, typename Active>
ComponentLabels two_pass(int width, int height, Same same, Active active) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  ComponentLabels out{width, height, std::vector<std::uint32_t>(n, kNoComponent), {}};
  std::vector<std::uint32_t> provisional(n, kNoComponent);
  std::uint32_t next = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (!active(i)) continue;
      const bool left = x > 0 && active(i - 1) && same(i, i - 1);
      const bool up = y > 0 && active(i - width) && same(i, i - width);
      if (left && up) {
        provisional[i] = provisional[i - 1];
        if (provisional[i - width] != provisional[i - 1]) {
          links.emplace_back(provisional[i - 1], provisional[i - width]);
        }
      } else if (left) {
        provisional[i] = provisional[i - 1];
      } else if (up) {
        provisional[i] = provisional[i - width];
      } else {
        provisional[i] = next++;
      }
    }
  }

  DisjointSet sets(next);
  for (auto [a, b] : links) sets.unite(a, b);

  std::vector<std::uint32_t> final_id(next, kNoComponent);
  for (std::size_t i = 0; i < n; ++i) {
    if (provisional[i] == kNoComponent) continue;
    const auto root = sets.find(provisional[i]);
    if (final_id[root] == kNoComponent) {
      final_id[root] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.labels[i] = final_id[root];
    ++out.sizes[final_id[root]];
  }
  return out;
}

template <typename T>
ComponentLabels label_equal(std::span<const T> grid, int width, int height) {
  return two_pass(
      width, height, [&](std::size_t a, std::size_t b) { return grid[a] == grid[b]; },
      [](std::size_t) { return true; });
}

}  // namespace

ComponentLabels label_regions(std::span<const std::uint8_t> grid, int width, int height) {
  return label_equal(grid, width, height);
}

ComponentLabels label_regions(std::span<const std::uint16_t> grid, int width, int height) {
  return label_equal(grid, width, height);
}

ComponentLabels label_foreground(std::span<const std::uint8_t> mask, int width, int height) {
  return two_pass(
      width, height, [](std::size_t, std::size_t) { return true; },
      [&](std::size_t i) { return mask[i] != 0; });
}

SectionMask sections_from_components(const ClassMap& map) {
  auto comps = label_regions(map.labels(), map.width(), map.height());
  if (comps.count() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(Errc::invalid_argument, "class map has more than 65535 regions");
  }
  std::vector<std::uint16_t> ids(comps.labels.begin(), comps.labels.end());
  return SectionMask(map.width(), map.height(), std::move(ids));
}

}  // namespace surgq
