#pragma once

// Fusion of a per-pixel class prediction with an unlabeled section partition:
// every section takes the majority class of its pixels, then 4-adjacent
// sections that ended up with the same class are merged.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "surgq/scene.hpp"

namespace surgq {

struct SectionAssignment {
  /// Indexed by section id. An unset entry makes the assignment incomplete.
  std::vector<std::optional<ClassId>> classes;
  /// Per-section pixel count for each class.
  std::vector<std::array<std::uint32_t, kClassCount>> tallies;

  std::size_t section_count() const noexcept { return classes.size(); }
};

/// Majority vote per section. Ties go to the lowest class id.
SectionAssignment vote_section_classes(const ClassMap& class_map, const SectionMask& section_mask);

/// output[p] = assignment[section_mask[p]]; throws MissingSection for the
/// first section id without a class.
ClassMap relabel(const SectionMask& section_mask, const SectionAssignment& assignment);

/// Unites 4-adjacent sections with the same assigned class. Output ids are
/// renumbered by first pixel in row-major order.
SectionMask merge_sections(const SectionMask& section_mask, const SectionAssignment& assignment);

struct FusionResult {
  FusedScene scene;
  SectionAssignment assignment;
  /// Input section id -> merged section id.
  std::vector<std::uint32_t> merged_into;
};

FusionResult fuse_detailed(const ClassMap& class_map, const SectionMask& section_mask);

inline FusedScene fuse(const ClassMap& class_map, const SectionMask& section_mask) {
  return fuse_detailed(class_map, section_mask).scene;
}

}  // namespace surgq
