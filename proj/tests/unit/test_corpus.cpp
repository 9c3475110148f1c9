#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <thread>

#include "fixtures.hpp"
#include "surgq/corpus.hpp"
#include "surgq/fusion.hpp"
#include "surgq/labeling.hpp"
#include "test_util.hpp"

namespace surgq {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(ProjectTest, InitSaveLoad) {
  TempDir dir;
  const auto root = dir / "p";
  auto p = Project::init(root, "demo", 64, 36);
  EXPECT_ERRC(Project::init(root, "again", 64, 36), Errc::invalid_argument);
  p.add_video({"video01", 25});
  const auto cm = ClassMap::filled(64, 36, ClassId::liver);
  p.add_frame({"video01", 0, 0}, fuse(cm, sections_from_components(cm)), render_class_map(cm));
  p.save();
  const auto q = Project::load(root);
  EXPECT_EQ(q.manifest(), p.manifest());
  EXPECT_EQ(json::parse(slurp(root / "manifest.json"))["schema"], "surgproj/1");
  EXPECT_TRUE(fs::exists(root / q.manifest().frames[0].thumb));
  EXPECT_EQ(read_rgb(root / q.manifest().frames[0].image).width, 64);
}

TEST(ProjectTest, DeletedPngIsMissingAsset) {
  TempDir dir;
  testing::write_small_project(dir / "p", 4);
  const auto p = Project::open(dir / "p");
  fs::remove(dir / "p" / p.manifest().frames[2].class_map);
  EXPECT_ERRC(Project::load(dir / "p"), Errc::missing_asset);
}

TEST(ProjectTest, FramesMustArriveInOrder) {
  TempDir dir;
  auto p = Project::init(dir / "p", "demo", 8, 8);
  p.add_video({"v", 1});
  const auto cm = ClassMap::filled(8, 8, ClassId::fat);
  const auto scene = fuse(cm, sections_from_components(cm));
  p.add_frame({"v", 5, 5000}, scene, render_class_map(cm));
  EXPECT_ERRC(p.add_frame({"v", 4, 6000}, scene, render_class_map(cm)), Errc::invalid_argument);
  EXPECT_ERRC(p.add_frame({"v", 6, 5000}, scene, render_class_map(cm)), Errc::invalid_argument);
  EXPECT_ERRC(p.add_frame({"a", 0, 0}, scene, render_class_map(cm)), Errc::invalid_argument);
  const auto wrong = ClassMap::filled(9, 8, ClassId::fat);
  EXPECT_ERRC(p.add_frame({"v", 7, 7000}, fuse(wrong, sections_from_components(wrong)), render_class_map(wrong)),
              Errc::dimension_mismatch);
}

TEST(ProjectTest, CorruptManifest) {
  TempDir dir;
  Project::init(dir / "p", "demo", 8, 8);
  auto j = json::parse(slurp(dir / "p" / "manifest.json"));
  j["schema"] = "surgproj/9";
  std::ofstream(dir / "p" / "manifest.json") << j.dump();
  EXPECT_ERRC(Project::open(dir / "p"), Errc::corrupt_manifest);
  std::ofstream(dir / "p" / "manifest.json") << "{not json";
  EXPECT_ERRC(Project::open(dir / "p"), Errc::corrupt_manifest);
}

TEST(ProjectTest, ResolveRejectsEscapes) {
  TempDir dir;
  const auto p = Project::init(dir / "p", "demo", 8, 8);
  EXPECT_ERRC(p.resolve("../etc/passwd"), Errc::invalid_argument);
  EXPECT_ERRC(p.resolve("/etc/passwd"), Errc::invalid_argument);
  EXPECT_EQ(p.resolve("assets/../frames/x.png"), dir / "p" / "frames" / "x.png");
}

TEST(ProjectTest, IndexStalenessFollowsInventory) {
  TempDir dir;
  testing::write_small_project(dir / "p", 5);
  auto p = Project::load(dir / "p");
  EXPECT_FALSE(p.index_stale());
  ASSERT_TRUE(p.current_index());
  EXPECT_EQ(p.current_index()->size(), 5u);
  const auto& last = p.manifest().frames.back().frame;
  const auto cm = ClassMap::filled(p.manifest().width, p.manifest().height, ClassId::fat);
  p.add_frame({last.video_id, last.frame_index + 1, last.timestamp_ms + 1000}, fuse(cm, sections_from_components(cm)),
              render_class_map(cm));
  EXPECT_TRUE(p.index_stale());
  EXPECT_FALSE(p.current_index());
  p.rebuild_index();
  EXPECT_FALSE(p.index_stale());
}

TEST(ProjectTest, QuizStorage) {
  TempDir dir;
  auto p = Project::init(dir / "p", "demo", 8, 8);
  std::mt19937_64 rng(3);
  auto quiz = testing::random_quiz(rng);
  quiz.id = "anatomy-1";
  p.store_quiz(quiz);
  p.save();
  const auto q = Project::open(dir / "p");
  EXPECT_EQ(q.quiz_ids(), std::vector<std::string>{"anatomy-1"});
  EXPECT_EQ(q.load_quiz("anatomy-1"), quiz);
  EXPECT_ERRC(q.load_quiz("../manifest"), Errc::invalid_argument);
  EXPECT_TRUE(p.remove_quiz("anatomy-1"));
  EXPECT_FALSE(p.remove_quiz("anatomy-1"));
  EXPECT_FALSE(fs::exists(dir / "p" / "quizzes" / "anatomy-1.json"));
}

TEST(WriterLockTest, SecondWriterWaits) {
  TempDir dir;
  Project::init(dir / "p", "demo", 8, 8);
  std::atomic<bool> released{false};
  std::atomic<bool> second_got_it_early{false};
  auto first = std::make_unique<WriterLock>(dir / "p");
  EXPECT_FALSE(WriterLock::try_acquire(dir / "p"));
  std::thread second([&] {
    WriterLock lock(dir / "p");
    if (!released) second_got_it_early = true;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  released = true;
  first.reset();
  second.join();
  EXPECT_FALSE(second_got_it_early);
  EXPECT_TRUE(WriterLock::try_acquire(dir / "p"));
}

TEST(WriterLockTest, ConcurrentSavesLeaveValidManifest) {
  TempDir dir;
  Project::init(dir / "p", "demo", 8, 8);
  std::vector<std::thread> writers;
  for (int i = 0; i < 8; ++i) {
    writers.emplace_back([&, i] {
      auto p = Project::open(dir / "p");
      for (int k = 0; k < 10; ++k) {
        p.manifest().name = "writer-" + std::to_string(i) + "-" + std::to_string(k);
        p.save();
      }
    });
  }
  for (auto& t : writers) t.join();
  const auto p = Project::open(dir / "p");
  EXPECT_EQ(p.manifest().name.rfind("writer-", 0), 0u);
}

TEST(ImporterTest, MappingRules) {
  const auto mapping = load_class_mapping(fs::path(SURGQ_CONFIG_DIR) / "cholecseg8k.json");
  ImportReport report;
  RgbImage ann(4, 1);
  const std::uint8_t values[] = {31, 50, 22, 77};  // Grasper, background, gallbladder, unknown
  for (int x = 0; x < 4; ++x) ann.set_pixel(x, 0, {values[x], values[x], values[x]});
  const auto cm = remap_annotation(ann, mapping, {}, report);
  EXPECT_EQ(cm, ClassMap(4, 1, {5, 0, 8, 0}));
  EXPECT_EQ(report.unmapped.at(77), 1u);
  EXPECT_ERRC(remap_annotation(ann, mapping, {true}, report), Errc::unknown_source_class);
}

TEST(ImporterTest, M2caiConfigParses) {
  const auto mapping = load_class_mapping(fs::path(SURGQ_CONFIG_DIR) / "m2caiseg.json");
  EXPECT_FALSE(mapping.rules.empty());
  for (const auto& r : mapping.rules) {
    if (r.value <= 8) EXPECT_EQ(r.target, ClassId::tool) << r.source;
  }
}

TEST(ImporterTest, RejectsDuplicateValues) {
  const auto j = json::parse(R"({"name": "x", "encoding": "gray", "mask_suffix": "_m.png",
      "classes": [{"source": "a", "value": 1, "target": "Liver"}, {"source": "b", "value": 1, "target": "Fat"}]})");
  EXPECT_THROW(class_mapping_from_json(j), Error);
}

TEST(ImporterTest, ImportsDirectoryTree) {
  TempDir dir;
  const auto src = dir / "src";
  fs::create_directories(src / "video12" / "clip_a");
  for (int idx : {80, 40}) {
    RgbImage ann(16, 12, {50, 50, 50});
    for (int y = 2; y < 8; ++y)
      for (int x = 3; x < 9; ++x) ann.set_pixel(x, y, {21, 21, 21});
    write_rgb(src / "video12" / "clip_a" / ("frame_" + std::to_string(idx) + "_endo_watershed_mask.png"), ann);
    write_rgb(src / "video12" / "clip_a" / ("frame_" + std::to_string(idx) + "_endo.png"), RgbImage(16, 12, {9, 9, 9}));
  }
  auto p = Project::init(dir / "p", "chole", 16, 12);
  const auto mapping = load_class_mapping(fs::path(SURGQ_CONFIG_DIR) / "cholecseg8k.json");
  const auto report = import_dataset(p, src, mapping);
  EXPECT_EQ(report.frames, 2u);
  ASSERT_EQ(p.manifest().frames.size(), 2u);
  EXPECT_EQ(p.manifest().frames[0].frame.video_id, "video12");
  EXPECT_EQ(p.manifest().frames[0].frame.frame_index, 40);
  EXPECT_EQ(p.manifest().frames[1].frame.timestamp_ms, 80 * 1000 / 25);
  const auto scene = p.scene(p.manifest().frames[0]);
  EXPECT_EQ(scene->class_map.at(4, 4), ClassId::liver);
  EXPECT_EQ(scene->sections.size(), 2u);
  EXPECT_EQ(p.image(p.manifest().frames[0]).pixel(0, 0), (Rgb{9, 9, 9}));
  p.save();
  EXPECT_NO_THROW(Project::load(dir / "p"));
  // Re-import skips frames already present.
  EXPECT_EQ(import_dataset(p, src, mapping).frames, 0u);
}

TEST(SyntheticTest, ZeroNoiseKeepsTruth) {
  auto spec = testing::small_spec(6);
  spec.noise = 0.0;
  for (const auto& f : generate_synthetic(spec).frames) EXPECT_EQ(f.noisy, f.truth);
}

TEST(SyntheticTest, NoiseIsMinorityPerSection) {
  const auto corpus = generate_synthetic(testing::small_spec(10));
  for (const auto& f : corpus.frames) {
    std::vector<std::uint32_t> flips(f.truth_sections.section_count()), sizes(f.truth_sections.section_count());
    for (std::size_t i = 0; i < f.truth.size(); ++i) {
      ++sizes[f.truth_sections[i]];
      flips[f.truth_sections[i]] += f.noisy[i] != f.truth[i];
    }
    for (std::size_t s = 0; s < sizes.size(); ++s) EXPECT_LT(2 * flips[s], sizes[s]);
    EXPECT_EQ(fuse(f.noisy, f.truth_sections).class_map, f.truth);
  }
}

TEST(SyntheticTest, SameSeedSameBytes) {
  TempDir dir;
  const auto spec = testing::small_spec(5, 9);
  write_synthetic_project(generate_synthetic(spec), dir / "a");
  write_synthetic_project(generate_synthetic(spec), dir / "b");
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file() || e.path().filename() == ".surgq.lock") continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 20u);
}

TEST(SyntheticTest, SpecValidation) {
  auto spec = testing::small_spec(3);
  spec.noise = 0.5;
  EXPECT_ERRC(generate_synthetic(spec), Errc::invalid_spec);
  spec.noise = 0.1;
  spec.frames = 0;
  EXPECT_ERRC(generate_synthetic(spec), Errc::invalid_spec);
}

}  // namespace
}  // namespace surgq
