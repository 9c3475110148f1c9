#include "surgq/search.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace surgq {

namespace {

constexpr double kDistanceScale = 2.0 / kClassCount;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(T v) {
    bytes(&v, sizeof(v));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint32_t count_differences(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::uint32_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

}  // namespace

double map_distance(const ClassMap& a, const ClassMap& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(Errc::dimension_mismatch, "maps differ in size");
  }
  return kDistanceScale * count_differences(a.labels(), b.labels()) / static_cast<double>(a.size());
}

FrameIndex::FrameIndex(GridSize grid, std::vector<Entry> entries) : grid_(grid), entries_(std::move(entries)) {
  if (grid_.width < 1 || grid_.height < 1) throw Error(Errc::invalid_grid, "index grid must be >= 1x1");
  if (entries_.empty()) throw Error(Errc::empty_corpus, "no frames to index");
  const std::size_t cells = static_cast<std::size_t>(grid_.width) * grid_.height;
  for (const auto& e : entries_) {
    if (e.cells.size() != cells) throw Error(Errc::invalid_grid, "entry " + e.frame.key() + " has wrong cell count");
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return frame_order_less(a.frame, b.frame); });

  Fnv1a h;
  h.value(static_cast<std::int32_t>(grid_.width));
  h.value(static_cast<std::int32_t>(grid_.height));
  for (const auto& e : entries_) {
    h.bytes(e.frame.video_id.data(), e.frame.video_id.size());
    h.value(std::uint8_t{0});
    h.value(e.frame.frame_index);
    h.value(e.frame.timestamp_ms);
    h.bytes(e.cells.data(), e.cells.size());
  }
  fingerprint_ = h.hex();
}

IndexBuilder::IndexBuilder(GridSize grid) : grid_(grid) {
  if (grid.width < 1 || grid.height < 1) throw Error(Errc::invalid_grid, "index grid must be >= 1x1");
}

void IndexBuilder::add(FrameRef frame, const ClassMap& class_map) {
  auto small = downsample(class_map, grid_);
  const auto cells = small.labels();
  entries_.push_back({std::move(frame), std::vector<std::uint8_t>(cells.begin(), cells.end())});
}

FrameIndex IndexBuilder::build() && { return FrameIndex(grid_, std::move(entries_)); }

FrameIndex build_index(std::span<const FrameRef> frames, std::span<const FusedScene> scenes, GridSize grid) {
  if (frames.size() != scenes.size()) throw Error(Errc::length_mismatch, "frames and scenes differ in count");
  IndexBuilder builder(grid);
  for (std::size_t i = 0; i < frames.size(); ++i) builder.add(frames[i], scenes[i].class_map);
  return std::move(builder).build();
}

ClassMap reference_at_grid(const ClassMap& reference, GridSize grid) {
  if (reference.width() == grid.width && reference.height() == grid.height) return reference;
  if (reference.width() < grid.width || reference.height() < grid.height) {
    throw Error(Errc::grid_mismatch, "reference " + std::to_string(reference.width()) + "x" +
                                         std::to_string(reference.height()) + " is smaller than the " +
                                         std::to_string(grid.width) + "x" + std::to_string(grid.height) +
                                         " index grid");
  }
  return downsample(reference, grid);
}

std::vector<SearchHit> rank_frames(const FrameIndex& index, const ClassMap& reference,
                                   const std::optional<std::string>& video_id) {
  if (index.size() == 0) throw Error(Errc::empty_index, "index holds no frames");
  const auto ref = reference_at_grid(reference, index.grid());
  const auto cells = ref.labels();
  const double per_cell = kDistanceScale / static_cast<double>(cells.size());

  std::vector<SearchHit> hits;
  hits.reserve(index.size());
  for (const auto& e : index.entries()) {
    if (video_id && e.frame.video_id != *video_id) continue;
    const auto diff = count_differences(cells, e.cells);
    hits.push_back({e.frame, per_cell * diff, diff});
  }
  // Entries are already in (video_id, frame_index) order, so a stable sort
  // on the integer difference count settles ties exactly.
  std::stable_sort(hits.begin(), hits.end(),
                   [](const SearchHit& a, const SearchHit& b) { return a.differing_cells < b.differing_cells; });
  return hits;
}

SearchResult search(const FrameIndex& index, const ClassMap& reference, const SearchOptions& options) {
  if (options.k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
  if (options.min_gap_ms < 0) throw Error(Errc::invalid_argument, "min_gap_ms must be >= 0");
  auto ranked = rank_frames(index, reference, options.video_id);

  SearchResult out{{}, index.grid(), options};
  for (auto& hit : ranked) {
    if (out.hits.size() >= options.k) break;
    const bool suppressed = std::any_of(out.hits.begin(), out.hits.end(), [&](const SearchHit& kept) {
      if (kept.frame.video_id != hit.frame.video_id) return false;
      const auto gap = kept.frame.timestamp_ms - hit.frame.timestamp_ms;
      return (gap < 0 ? -gap : gap) < options.min_gap_ms;
    });
    if (!suppressed) out.hits.push_back(std::move(hit));
  }
  return out;
}

SearchResult search(const FrameIndex& index, const PolygonScene& reference, const SearchOptions& options) {
  return search(index, rasterize(reference), options);
}

double evaluate_a_at_n(std::span<const std::vector<bool>> judgments, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be >= 1");
  if (judgments.empty()) throw Error(Errc::invalid_argument, "no queries");
  std::size_t relevant = 0;
  for (std::size_t q = 0; q < judgments.size(); ++q) {
    if (judgments[q].size() != n) {
      throw Error(Errc::ragged_judgments, "query " + std::to_string(q) + " has " +
                                              std::to_string(judgments[q].size()) + " judgments, expected " +
                                              std::to_string(n));
    }
    relevant += static_cast<std::size_t>(std::count(judgments[q].begin(), judgments[q].end(), true));
  }
  return static_cast<double>(relevant) / static_cast<double>(n * judgments.size());
}

std::vector<std::vector<bool>> parse_judgments_jsonl(const std::string& text) {
  std::vector<std::vector<bool>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where, e.what());
    }
    if (!j.is_object() || !j.contains("judgments") || !j["judgments"].is_array()) {
      throw ParseError(where + "/judgments", "expected an array of booleans");
    }
    std::vector<bool> row;
    for (const auto& v : j["judgments"]) {
      if (!v.is_boolean()) throw ParseError(where + "/judgments", "expected booleans");
      row.push_back(v.get<bool>());
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace surgq
