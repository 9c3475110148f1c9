#include "surgq/scene.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_map>

namespace surgq {

namespace {

constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "Background", "Abdominal Wall", "Liver",           "Gastrointestinal Tract", "Fat",
    "Tool",       "Blood",          "Connected Tissue", "Gallbladder"};

constexpr std::array<Rgb, kClassCount> kPalette = {{
    {0, 0, 0},
    {210, 140, 140},
    {255, 114, 114},
    {231, 70, 156},
    {186, 183, 75},
    {170, 255, 0},
    {255, 0, 0},
    {255, 255, 255},
    {255, 160, 165},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

void check_dims(int width, int height, std::size_t n) {
  if (width < 1 || height < 1) {
    throw Error(Errc::invalid_argument, "grid dimensions must be >= 1");
  }
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != n) {
    throw Error(Errc::dimension_mismatch,
                "grid holds " + std::to_string(n) + " cells, expected " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

ClassId class_from_int(int value, std::size_t position) {
  if (value < 0 || value >= kClassCount) throw InvalidClassId(value, position);
  return static_cast<ClassId>(value);
}

std::string_view class_name(ClassId c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<ClassId> class_from_name(std::string_view name) {
  for (ClassId c : kAllClasses) {
    if (iequals(class_name(c), name)) return c;
  }
  if (iequals(name, "G.I. Tract") || iequals(name, "GI Tract")) return ClassId::gi_tract;
  return std::nullopt;
}

Rgb palette_color(ClassId c) { return kPalette[static_cast<std::size_t>(c)]; }

GridSize parse_grid(std::string_view text) {
  const auto x = text.find_first_of("xX");
  GridSize g;
  if (x == std::string_view::npos) throw Error(Errc::invalid_grid, "expected WxH, got '" + std::string(text) + "'");
  auto w = std::from_chars(text.data(), text.data() + x, g.width);
  auto h = std::from_chars(text.data() + x + 1, text.data() + text.size(), g.height);
  if (w.ec != std::errc{} || h.ec != std::errc{} || w.ptr != text.data() + x ||
      h.ptr != text.data() + text.size() || g.width < 1 || g.height < 1) {
    throw Error(Errc::invalid_grid, "expected WxH, got '" + std::string(text) + "'");
  }
  return g;
}

ClassMap::ClassMap(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  check_dims(width_, height_, labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= kClassCount) throw InvalidClassId(labels_[i], i);
  }
}

ClassMap ClassMap::filled(int width, int height, ClassId c) {
  if (width < 1 || height < 1) throw Error(Errc::invalid_argument, "grid dimensions must be >= 1");
  return ClassMap(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height,
                                            static_cast<std::uint8_t>(c)));
}

SectionMask::SectionMask(int width, int height, std::vector<std::uint16_t> sections)
    : width_(width), height_(height), sections_(std::move(sections)), n_sections_(0) {
  check_dims(width_, height_, sections_.size());
  const std::uint16_t max_id = *std::max_element(sections_.begin(), sections_.end());
  std::vector<bool> seen(static_cast<std::size_t>(max_id) + 1, false);
  for (auto id : sections_) seen[id] = true;
  for (std::size_t id = 0; id < seen.size(); ++id) {
    if (!seen[id]) {
      throw Error(Errc::non_contiguous_section_ids,
                  "section id " + std::to_string(id) + " unused but max id is " + std::to_string(max_id));
    }
  }
  n_sections_ = static_cast<std::uint32_t>(max_id) + 1;
}

SectionMask SectionMask::renumbered(int width, int height, std::span<const std::uint32_t> raw_ids) {
  check_dims(width, height, raw_ids.size());
  std::unordered_map<std::uint32_t, std::uint16_t> remap;
  std::vector<std::uint16_t> out(raw_ids.size());
  for (std::size_t i = 0; i < raw_ids.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(raw_ids[i], static_cast<std::uint16_t>(remap.size()));
    if (inserted && remap.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(Errc::invalid_argument, "more than 65535 sections");
    }
    out[i] = it->second;
  }
  return SectionMask(width, height, std::move(out));
}

ValidatedPair validate_pair(const ClassMap& class_map, const SectionMask& section_mask) {
  if (class_map.width() != section_mask.width() || class_map.height() != section_mask.height()) {
    throw Error(Errc::dimension_mismatch,
                "class map " + std::to_string(class_map.width()) + "x" +
                    std::to_string(class_map.height()) + " vs section mask " +
                    std::to_string(section_mask.width()) + "x" + std::to_string(section_mask.height()));
  }
  return {class_map, section_mask};
}

ClassMap downsample(const ClassMap& map, int grid_w, int grid_h) {
  if (grid_w < 1 || grid_h < 1 || grid_w > map.width() || grid_h > map.height()) {
    throw Error(Errc::invalid_grid, std::to_string(grid_w) + "x" + std::to_string(grid_h) +
                                        " does not fit a " + std::to_string(map.width()) + "x" +
                                        std::to_string(map.height()) + " map");
  }
  // floor((i + 0.5) * W / g) == ((2i + 1) * W) / (2g) in exact integer arithmetic.
  std::vector<int> xs(static_cast<std::size_t>(grid_w));
  for (int i = 0; i < grid_w; ++i) {
    xs[i] = static_cast<int>((2LL * i + 1) * map.width() / (2LL * grid_w));
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(grid_w) * grid_h);
  const auto src = map.labels();
  for (int j = 0; j < grid_h; ++j) {
    const auto y = static_cast<std::size_t>((2LL * j + 1) * map.height() / (2LL * grid_h));
    const auto* row = src.data() + y * map.width();
    for (int i = 0; i < grid_w; ++i) out[static_cast<std::size_t>(j) * grid_w + i] = row[xs[i]];
  }
  return ClassMap(grid_w, grid_h, std::move(out));
}

std::array<std::uint64_t, kClassCount> class_histogram(const ClassMap& map) {
  std::array<std::uint64_t, kClassCount> counts{};
  for (auto v : map.labels()) ++counts[v];
  return counts;
}

FusedScene FusedScene::assemble(ClassMap class_map, SectionMask section_mask) {
  validate_pair(class_map, section_mask);
  std::vector<SectionRecord> table(section_mask.section_count());
  std::vector<bool> touched(table.size(), false);
  const int w = class_map.width();
  for (int y = 0; y < class_map.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const auto s = section_mask.at(x, y);
      const auto c = class_map.at(x, y);
      auto& rec = table[s];
      if (!touched[s]) {
        touched[s] = true;
        rec.cls = c;
        rec.bounds = {x, y, x, y};
      } else if (rec.cls != c) {
        throw Error(Errc::impure_section, "section " + std::to_string(s) + " holds classes " +
                                              std::to_string(to_int(rec.cls)) + " and " +
                                              std::to_string(to_int(c)));
      }
      ++rec.pixel_count;
      rec.bounds.x0 = std::min(rec.bounds.x0, x);
      rec.bounds.x1 = std::max(rec.bounds.x1, x);
      rec.bounds.y1 = y;
    }
  }
  return FusedScene{std::move(class_map), std::move(section_mask), std::move(table)};
}

std::size_t same_class_adjacent_pairs(const FusedScene& scene) {
  const auto& m = scene.section_mask;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  auto consider = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b || scene.sections[a].cls != scene.sections[b].cls) return;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (x + 1 < m.width()) consider(m.at(x, y), m.at(x + 1, y));
      if (y + 1 < m.height()) consider(m.at(x, y), m.at(x, y + 1));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return static_cast<std::size_t>(std::unique(pairs.begin(), pairs.end()) - pairs.begin());
}

std::string FrameRef::key() const { return video_id + ":" + std::to_string(frame_index); }

void check_frame_sequence(std::span<const FrameRef> frames) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const auto& a = frames[i - 1];
    const auto& b = frames[i];
    if (a.video_id != b.video_id) continue;
    if (b.frame_index <= a.frame_index || b.timestamp_ms <= a.timestamp_ms) {
      throw Error(Errc::invalid_argument, "frame " + b.key() + " does not advance past " + a.key());
    }
  }
}

}  // namespace surgq
