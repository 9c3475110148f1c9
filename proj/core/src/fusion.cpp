#include "surgq/fusion.hpp"

#include "surgq/labeling.hpp"

namespace surgq {

namespace {

std::vector<std::uint8_t> class_lookup(const SectionAssignment& assignment, std::uint32_t n_sections) {
  std::vector<std::uint8_t> lut(n_sections);
  for (std::uint32_t s = 0; s < n_sections; ++s) {
    if (s >= assignment.classes.size() || !assignment.classes[s]) throw MissingSection(s);
    lut[s] = static_cast<std::uint8_t>(*assignment.classes[s]);
  }
  return lut;
}

}  // namespace

SectionAssignment vote_section_classes(const ClassMap& class_map, const SectionMask& section_mask) {
  validate_pair(class_map, section_mask);
  const auto n = section_mask.section_count();
  SectionAssignment out;
  out.tallies.assign(n, {});
  out.classes.assign(n, std::nullopt);

  const auto labels = class_map.labels();
  const auto ids = section_mask.ids();
  for (std::size_t i = 0; i < labels.size(); ++i) ++out.tallies[ids[i]][labels[i]];

  for (std::uint32_t s = 0; s < n; ++s) {
    const auto& t = out.tallies[s];
    int best = 0;
    for (int c = 1; c < kClassCount; ++c) {
      if (t[c] > t[best]) best = c;  // strict: earlier (lower) id wins ties
    }
    out.classes[s] = static_cast<ClassId>(best);
  }
  return out;
}

ClassMap relabel(const SectionMask& section_mask, const SectionAssignment& assignment) {
  const auto lut = class_lookup(assignment, section_mask.section_count());
  const auto ids = section_mask.ids();
  std::vector<std::uint8_t> labels(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) labels[i] = lut[ids[i]];
  return ClassMap(section_mask.width(), section_mask.height(), std::move(labels));
}

namespace {

// Returns the merged mask together with the old -> new id table.
std::pair<SectionMask, std::vector<std::uint32_t>> merge_with_table(const SectionMask& mask,
                                                                    const std::vector<std::uint8_t>& lut) {
  const int w = mask.width();
  const int h = mask.height();
  const auto ids = mask.ids();
  DisjointSet sets(mask.section_count());
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const auto a = ids[row + x];
      if (x + 1 < w) {
        const auto b = ids[row + x + 1];
        if (a != b && lut[a] == lut[b]) sets.unite(a, b);
      }
      if (y + 1 < h) {
        const auto b = ids[row + w + x];
        if (a != b && lut[a] == lut[b]) sets.unite(a, b);
      }
    }
  }

  constexpr std::uint32_t unset = 0xFFFFFFFFu;
  std::vector<std::uint32_t> root_to_new(mask.section_count(), unset);
  std::vector<std::uint32_t> old_to_new(mask.section_count(), unset);
  std::uint32_t next = 0;
  std::vector<std::uint16_t> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto old_id = ids[i];
    if (old_to_new[old_id] == unset) {
      const auto root = sets.find(old_id);
      if (root_to_new[root] == unset) root_to_new[root] = next++;
      old_to_new[old_id] = root_to_new[root];
    }
    out[i] = static_cast<std::uint16_t>(old_to_new[old_id]);
  }
  return {SectionMask(w, h, std::move(out)), std::move(old_to_new)};
}

}  // namespace

SectionMask merge_sections(const SectionMask& section_mask, const SectionAssignment& assignment) {
  return merge_with_table(section_mask, class_lookup(assignment, section_mask.section_count())).first;
}

FusionResult fuse_detailed(const ClassMap& class_map, const SectionMask& section_mask) {
  validate_pair(class_map, section_mask);
  auto assignment = vote_section_classes(class_map, section_mask);
  auto relabeled = relabel(section_mask, assignment);
  auto [merged, table] =
      merge_with_table(section_mask, class_lookup(assignment, section_mask.section_count()));
  auto scene = FusedScene::assemble(std::move(relabeled), std::move(merged));
  return FusionResult{std::move(scene), std::move(assignment), std::move(table)};
}

}  // namespace surgq
