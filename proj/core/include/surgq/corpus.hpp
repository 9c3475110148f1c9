#pragma once

// On-disk project store. Layout under the project root:
//   manifest.json      "schema": "surgproj/1"
//   frames/            RGB stills (PNG)
//   thumbs/            320 px wide JPEG previews
//   classmaps/         fused class maps (8-bit gray PNG)
//   sections/          fused section masks (16-bit gray PNG)
//   truth/, noisy/     optional reference maps (synthetic corpora)
//   features.sfv       optional per-frame feature series
//   index.bin          optional search index
//   quizzes/<id>.json
//   assets/            inpainted images, tool bank, other quiz media
// Readers never lock; writers hold an advisory lock on ".surgq.lock".

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surgq/image_io.hpp"
#include "surgq/keyframes.hpp"
#include "surgq/quiz.hpp"
#include "surgq/scene.hpp"
#include "surgq/search.hpp"

namespace surgq {

inline constexpr const char* kProjectSchema = "surgproj/1";
inline constexpr int kThumbWidth = 320;

struct VideoRecord {
  std::string id;
  double fps = 25.0;
  bool operator==(const VideoRecord&) const = default;
};

struct FrameRecord {
  FrameRef frame;
  std::string image;
  std::string thumb;
  std::string class_map;
  std::string sections;
  std::optional<std::string> truth;
  std::optional<std::string> noisy;
  bool operator==(const FrameRecord&) const = default;
};

struct IndexRecord {
  std::string path;
  GridSize grid;
  std::string fingerprint;  // FrameIndex::fingerprint() of the file
  std::string inventory;    // inventory_fingerprint() when it was built
  bool operator==(const IndexRecord&) const = default;
};

struct Manifest {
  std::string name;
  int width = 0;
  int height = 0;
  std::vector<VideoRecord> videos;
  std::vector<FrameRecord> frames;  // (video_id, frame_index) order
  std::optional<std::string> features;
  std::optional<IndexRecord> index;
  std::vector<std::string> quizzes;
  bool operator==(const Manifest&) const = default;
};

nlohmann::json to_json(const Manifest& m);
/// Throws CorruptManifest naming the offending key.
Manifest manifest_from_json(const nlohmann::json& j);

/// Hash of the frame inventory (refs and class map paths); an index built
/// for a different inventory is stale.
std::string inventory_fingerprint(const Manifest& m);

/// Identifier rule for video and quiz ids: [A-Za-z0-9_.-]+, not "." or "..".
bool is_safe_id(const std::string& id);

/// Exclusive advisory lock on the project; blocks until acquired.
class WriterLock {
 public:
  explicit WriterLock(const std::filesystem::path& root);
  ~WriterLock();
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

  /// Non-blocking variant; empty when another writer holds the lock.
  static std::unique_ptr<WriterLock> try_acquire(const std::filesystem::path& root);

 private:
  WriterLock(int fd) : fd_(fd) {}
  int fd_ = -1;
};

class Project {
 public:
  /// Creates the directory layout and an empty manifest. Throws
  /// InvalidArgument if `root` already holds a manifest.
  static Project init(const std::filesystem::path& root, const std::string& name, int width, int height);

  /// Parses the manifest and checks every referenced file: maps decode, dims
  /// match the canvas, fused scenes are pure, features and index agree with
  /// the inventory, quizzes parse. Throws CorruptManifest or MissingAsset.
  static Project load(const std::filesystem::path& root);

  /// Manifest-only load without touching frame files.
  static Project open(const std::filesystem::path& root);

  Project(Project&& other) noexcept;
  Project& operator=(Project&& other) noexcept;

  const std::filesystem::path& root() const noexcept { return root_; }
  const Manifest& manifest() const noexcept { return manifest_; }
  Manifest& manifest() noexcept { return manifest_; }

  /// Atomically rewrites manifest.json under the writer lock.
  void save() const;
  /// Same, for callers already holding the lock.
  void save(const WriterLock& held) const;

  /// Resolves a project-relative path; throws InvalidArgument if it escapes the root.
  std::filesystem::path resolve(const std::string& rel) const;
  bool asset_exists(const std::string& rel) const;

  const FrameRecord* find_frame(const FrameRef& ref) const;
  const FrameRecord* find_frame(const std::string& key) const;

  /// Decoded fused scene; cached, safe to call concurrently.
  std::shared_ptr<const FusedScene> scene(const FrameRecord& rec) const;
  RgbImage image(const FrameRecord& rec) const;
  std::optional<FeatureSeries> features() const;

  /// Writes the frame's files and appends it to the manifest (not saved).
  /// Frames must arrive in (video_id, frame_index) order.
  const FrameRecord& add_frame(const FrameRef& ref, const FusedScene& scene, const RgbImage& image,
                               const ClassMap* truth = nullptr, const ClassMap* noisy = nullptr);
  void add_video(const VideoRecord& video);

  /// Builds the index from the fused class maps and records it in the
  /// manifest (not saved).
  FrameIndex rebuild_index(GridSize grid = kDefaultIndexGrid);
  /// Loads index.bin when it is current; empty when absent or stale.
  std::optional<FrameIndex> current_index() const;
  bool index_stale() const;

  QuestionContext question_context() const;

  std::vector<std::string> quiz_ids() const { return manifest_.quizzes; }
  Quiz load_quiz(const std::string& id) const;
  /// Writes quizzes/<id>.json and registers the id (manifest not saved).
  void store_quiz(const Quiz& quiz);
  /// Returns false if no such quiz.
  bool remove_quiz(const std::string& id);

 private:
  explicit Project(std::filesystem::path root) : root_(std::move(root)) {}
  void validate_files() const;

  std::filesystem::path root_;
  Manifest manifest_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const FusedScene>> scene_cache_;
};

/// Frames per video in a project; used by CLI and service listings.
std::map<std::string, std::vector<const FrameRecord*>> frames_by_video(const Manifest& m);

/// ISO-8601 UTC timestamp of the current time, e.g. 2026-10-16T09:30:00Z.
std::string utc_now();

// Dataset ingestion.
struct SourceClassRule {
  std::string source;
  std::uint32_t value = 0;  // gray value, or 0xRRGGBB for rgb encoding
  ClassId target = ClassId::background;
};

struct ClassMapping {
  std::string name;
  bool rgb = false;
  double fps = 25.0;
  std::string mask_suffix;   // e.g. "_endo_watershed_mask.png"
  std::string image_suffix;  // e.g. "_endo.png"
  std::vector<SourceClassRule> rules;
};

ClassMapping class_mapping_from_json(const nlohmann::json& j);
ClassMapping load_class_mapping(const std::filesystem::path& path);

struct ImportOptions {
  bool strict = false;
};

struct ImportReport {
  std::size_t frames = 0;
  /// Unmapped source value -> pixel count (mapped to Background).
  std::map<std::uint32_t, std::uint64_t> unmapped;
};

/// Maps one source annotation to the 9-class scheme. Throws
/// UnknownSourceClass in strict mode.
ClassMap remap_annotation(const RgbImage& annotation, const ClassMapping& mapping, const ImportOptions& options,
                          ImportReport& report);

/// Walks `src` for files ending in mapping.mask_suffix. The video id is the
/// first directory below `src`; the frame index is the last number in the
/// file name before the suffix. Sections are the connected components of the
/// remapped class map.
ImportReport import_dataset(Project& project, const std::filesystem::path& src, const ClassMapping& mapping,
                            const ImportOptions& options = {});

}  // namespace surgq
