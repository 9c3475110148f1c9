#pragma once

// Search-by-mask: frames are indexed as class maps downsampled to a fixed
// grid and ranked by the mean squared error between one-hot encodings of the
// reference map and each frame.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surgq/geometry.hpp"
#include "surgq/scene.hpp"

namespace surgq {

inline constexpr GridSize kDefaultIndexGrid{80, 45};

/// One-hot MSE over 9 channels: (2 / 9) * (fraction of cells whose labels differ).
double map_distance(const ClassMap& a, const ClassMap& b);

class FrameIndex {
 public:
  struct Entry {
    FrameRef frame;
    std::vector<std::uint8_t> cells;  // grid_w * grid_h class ids, row-major
  };

  /// Sorts entries by (video_id, frame_index); throws InvalidGrid on cell
  /// count mismatch and EmptyCorpus when empty.
  FrameIndex(GridSize grid, std::vector<Entry> entries);

  GridSize grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  /// FNV-1a over grid and every entry, as 16 hex digits.
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  GridSize grid_;
  std::vector<Entry> entries_;
  std::string fingerprint_;
};

/// Downsamples frames one at a time so a corpus never has to be resident.
class IndexBuilder {
 public:
  explicit IndexBuilder(GridSize grid);

  void add(FrameRef frame, const ClassMap& class_map);
  FrameIndex build() &&;

 private:
  GridSize grid_;
  std::vector<FrameIndex::Entry> entries_;
};

FrameIndex build_index(std::span<const FrameRef> frames, std::span<const FusedScene> scenes, GridSize grid);

struct SearchOptions {
  std::size_t k = 9;
  std::int64_t min_gap_ms = 2000;
  /// Restrict to one recording; empty means every video in the index.
  std::optional<std::string> video_id;
};

struct SearchHit {
  FrameRef frame;
  double distance = 0.0;
  std::uint32_t differing_cells = 0;
};

struct SearchResult {
  std::vector<SearchHit> hits;
  GridSize grid;
  SearchOptions options;
};

/// Reference brought to index resolution: used as-is when it already matches
/// the grid, center-sample downsampled otherwise. Throws GridMismatch if it
/// is smaller than the grid.
ClassMap reference_at_grid(const ClassMap& reference, GridSize grid);

/// Full ranking before temporal suppression: ascending distance, ties in
/// (video_id, frame_index) order.
std::vector<SearchHit> rank_frames(const FrameIndex& index, const ClassMap& reference,
                                   const std::optional<std::string>& video_id = std::nullopt);

SearchResult search(const FrameIndex& index, const ClassMap& reference, const SearchOptions& options = {});
SearchResult search(const FrameIndex& index, const PolygonScene& reference, const SearchOptions& options = {});

/// Fraction of relevant suggestions over n x query count. Throws
/// RaggedJudgments if some query does not carry exactly n judgments.
double evaluate_a_at_n(std::span<const std::vector<bool>> judgments, std::size_t n);

/// Reads JSON lines of {"query_id": ..., "judgments": [bool, ...]}.
std::vector<std::vector<bool>> parse_judgments_jsonl(const std::string& text);

// Index file: "SFI1", u32 grid_w, u32 grid_h, u32 count, then per entry
// u32 id length + id bytes, i64 frame_index, i64 timestamp_ms, grid cells.
std::vector<std::uint8_t> encode_index(const FrameIndex& index);
FrameIndex decode_index(std::span<const std::uint8_t> bytes);
FrameIndex read_index(const std::filesystem::path& path);
void write_index(const std::filesystem::path& path, const FrameIndex& index);

}  // namespace surgq
