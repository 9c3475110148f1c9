#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "surgq/fusion.hpp"
#include "surgq/labeling.hpp"
#include "test_util.hpp"

namespace surgq {
namespace {

std::vector<std::uint8_t> labels_of(const ClassMap& m) { return {m.labels().begin(), m.labels().end()}; }
std::vector<std::uint32_t> ids_of(const SectionMask& m) { return {m.ids().begin(), m.ids().end()}; }

TEST(VoteTest, MajorityWins) {
  // 10-pixel section: 7 Liver, 3 Fat.
  const ClassMap cm(10, 1, {2, 2, 4, 2, 2, 4, 2, 2, 4, 2});
  const SectionMask sm(10, 1, std::vector<std::uint16_t>(10, 0));
  const auto a = vote_section_classes(cm, sm);
  EXPECT_EQ(a.classes[0], ClassId::liver);
  EXPECT_EQ(a.tallies[0][2], 7u);
  EXPECT_EQ(a.tallies[0][4], 3u);
}

TEST(VoteTest, UnanimousSection) {
  const auto a = vote_section_classes(ClassMap::filled(3, 3, ClassId::gallbladder),
                                      SectionMask(3, 3, std::vector<std::uint16_t>(9, 0)));
  EXPECT_EQ(a.classes[0], ClassId::gallbladder);
}

TEST(VoteTest, TieGoesToLowestClassId) {
  const ClassMap cm(10, 1, {4, 3, 4, 3, 4, 3, 4, 3, 4, 3});
  const auto a = vote_section_classes(cm, SectionMask(10, 1, std::vector<std::uint16_t>(10, 0)));
  EXPECT_EQ(a.classes[0], ClassId::gi_tract);
}

TEST(RelabelTest, PerPixelLookup) {
  const SectionMask sm(4, 1, {0, 0, 1, 1});
  SectionAssignment a;
  a.classes = {ClassId::liver, ClassId::gallbladder};
  EXPECT_EQ(relabel(sm, a), ClassMap(4, 1, {2, 2, 8, 8}));

  SectionAssignment one;
  one.classes = {ClassId::blood};
  EXPECT_EQ(relabel(SectionMask(2, 2, {0, 0, 0, 0}), one), ClassMap::filled(2, 2, ClassId::blood));
}

TEST(RelabelTest, MissingSectionNamed) {
  SectionAssignment a;
  a.classes = {ClassId::liver, std::nullopt};
  try {
    relabel(SectionMask(2, 1, {0, 1}), a);
    FAIL();
  } catch (const MissingSection& e) {
    EXPECT_EQ(e.id(), 1u);
  }
}

TEST(MergeTest, TouchingSameClassSectionsMerge) {
  const SectionMask sm(4, 1, {0, 0, 1, 1});
  SectionAssignment a;
  a.classes = {ClassId::gi_tract, ClassId::gi_tract};
  EXPECT_EQ(merge_sections(sm, a).section_count(), 1u);
  a.classes = {ClassId::liver, ClassId::fat};
  EXPECT_EQ(merge_sections(sm, a).section_count(), 2u);
}

TEST(MergeTest, SeparatedByBandStaySeparate) {
  const SectionMask sm(5, 1, {0, 0, 1, 2, 2});
  SectionAssignment a;
  a.classes = {ClassId::fat, ClassId::liver, ClassId::fat};
  const auto out = merge_sections(sm, a);
  EXPECT_EQ(out.section_count(), 3u);
}

TEST(MergeTest, DiagonalContactDoesNotMerge) {
  const SectionMask sm(2, 2, {0, 1, 2, 0});
  SectionAssignment a;
  a.classes = {ClassId::fat, ClassId::liver, ClassId::liver};
  // Sections 1 and 2 touch only at a corner.
  EXPECT_EQ(merge_sections(sm, a).section_count(), 3u);
}

TEST(FuseTest, MinorityMislabelIsRepaired) {
  // One G.I. Tract section with a Liver-labeled minority next to a Fat section.
  std::vector<std::uint8_t> cls(20, 3);
  cls[1] = cls[2] = cls[6] = 2;
  for (int i = 10; i < 20; ++i) cls[i] = 4;
  std::vector<std::uint16_t> sec(20, 0);
  for (int i = 10; i < 20; ++i) sec[i] = 1;
  const auto out = fuse(ClassMap(10, 2, cls), SectionMask(10, 2, sec));
  std::vector<std::uint8_t> want(20, 3);
  for (int i = 10; i < 20; ++i) want[i] = 4;
  EXPECT_EQ(out.class_map, ClassMap(10, 2, want));
  EXPECT_EQ(out.sections.size(), 2u);
}

TEST(FuseTest, PureInputKeepsClassMap) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const ClassMap cm(12, 8, oracle::random_labels(12, 8, 5, rng, 2));
    const auto fused = fuse(cm, sections_from_components(cm));
    EXPECT_EQ(fused.class_map, cm);
  }
}

TEST(FuseTest, DimensionMismatch) {
  EXPECT_ERRC(fuse(ClassMap::filled(2, 2, ClassId::fat), SectionMask(3, 2, std::vector<std::uint16_t>(6, 0))),
              Errc::dimension_mismatch);
}

TEST(FuseTest, MatchesIndependentImplementation) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::random_pair(rng);
    const auto fused = fuse(p.class_map, p.section_mask);
    const auto o = oracle::fuse(labels_of(p.class_map), ids_of(p.section_mask), p.class_map.width(),
                                p.class_map.height());
    ASSERT_EQ(labels_of(fused.class_map), o.classes) << "trial " << trial;
    ASSERT_EQ(ids_of(fused.section_mask), o.sections) << "trial " << trial;
  }
}

TEST(FuseTest, MergedIntoMapsInputToOutputSections) {
  std::mt19937_64 rng(8);
  const auto p = testing::random_pair(rng);
  const auto r = fuse_detailed(p.class_map, p.section_mask);
  for (std::size_t i = 0; i < p.section_mask.size(); ++i) {
    EXPECT_EQ(r.scene.section_mask[i], r.merged_into[p.section_mask[i]]);
  }
  std::uint64_t pixels = 0;
  for (const auto& s : r.scene.sections) pixels += s.pixel_count;
  EXPECT_EQ(pixels, p.class_map.size());
}

}  // namespace
}  // namespace surgq
