#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "surgq/corpus.hpp"
#include "surgq/fusion.hpp"
#include "surgq/labeling.hpp"

namespace surgq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Error bad_config(const std::string& where, const std::string& what) {
  return Error(Errc::invalid_argument, "class mapping " + where + ": " + what);
}

std::uint32_t parse_rule_value(const json& v, bool rgb, const std::string& where) {
  if (!rgb) {
    if (!v.is_number_unsigned() || v.get<std::uint32_t>() > 255) throw bad_config(where, "expected a gray value 0-255");
    return v.get<std::uint32_t>();
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.size() != 7 || s[0] != '#' ||
        !std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isxdigit(c); })) {
      throw bad_config(where, "expected \"#RRGGBB\"");
    }
    return static_cast<std::uint32_t>(std::stoul(s.substr(1), nullptr, 16));
  }
  if (v.is_array() && v.size() == 3 &&
      std::all_of(v.begin(), v.end(), [](const json& c) { return c.is_number_unsigned() && c.get<int>() <= 255; })) {
    return (v[0].get<std::uint32_t>() << 16) | (v[1].get<std::uint32_t>() << 8) | v[2].get<std::uint32_t>();
  }
  throw bad_config(where, "expected \"#RRGGBB\" or [r, g, b]");
}

// Last run of digits in a file name, e.g. "frame_80_endo" -> 80.
std::optional<std::int64_t> trailing_number(const std::string& s) {
  auto end = s.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(s[end - 1]))) --end;
  if (end == 0) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(s[begin - 1]))) --begin;
  if (end - begin > 18) return std::nullopt;
  return std::stoll(s.substr(begin, end - begin));
}

struct SourceFrame {
  FrameRef ref;
  fs::path mask;
  fs::path image;
};

}  // namespace

ClassMapping class_mapping_from_json(const json& j) {
  if (!j.is_object()) throw bad_config("", "expected an object");
  ClassMapping m;
  m.name = j.value("name", std::string());
  const auto encoding = j.value("encoding", std::string("gray"));
  if (encoding != "gray" && encoding != "rgb") throw bad_config("/encoding", "expected \"gray\" or \"rgb\"");
  m.rgb = encoding == "rgb";
  m.fps = j.value("fps", 25.0);
  if (!(m.fps > 0)) throw bad_config("/fps", "must be positive");
  m.mask_suffix = j.value("mask_suffix", std::string(".png"));
  m.image_suffix = j.value("image_suffix", std::string());

  const auto it = j.find("classes");
  if (it == j.end() || !it->is_array()) throw bad_config("/classes", "expected an array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto where = "/classes/" + std::to_string(i);
    const auto& r = (*it)[i];
    if (!r.is_object() || !r.contains("value") || !r.contains("target")) {
      throw bad_config(where, "expected {\"source\", \"value\", \"target\"}");
    }
    SourceClassRule rule;
    rule.source = r.value("source", std::string());
    rule.value = parse_rule_value(r.at("value"), m.rgb, where + "/value");
    const auto& t = r.at("target");
    if (t.is_number_integer()) {
      const auto v = t.get<int>();
      if (v < 0 || v >= kClassCount) throw bad_config(where + "/target", "class id out of range");
      rule.target = static_cast<ClassId>(v);
    } else if (t.is_string()) {
      const auto c = class_from_name(t.get<std::string>());
      if (!c) throw bad_config(where + "/target", "unknown class \"" + t.get<std::string>() + "\"");
      rule.target = *c;
    } else {
      throw bad_config(where + "/target", "expected a class name or id");
    }
    const bool dup = std::any_of(m.rules.begin(), m.rules.end(),
                                 [&](const SourceClassRule& o) { return o.value == rule.value; });
    if (dup) throw bad_config(where + "/value", "value mapped twice");
    m.rules.push_back(std::move(rule));
  }
  return m;
}

ClassMapping load_class_mapping(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return class_mapping_from_json(json::parse(bytes.begin(), bytes.end()));
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

ClassMap remap_annotation(const RgbImage& annotation, const ClassMapping& mapping, const ImportOptions& options,
                          ImportReport& report) {
  std::unordered_map<std::uint32_t, ClassId> table;
  for (const auto& r : mapping.rules) table.emplace(r.value, r.target);

  const std::size_t n = static_cast<std::size_t>(annotation.width) * annotation.height;
  std::vector<std::uint8_t> labels(n);
  std::map<std::uint32_t, std::uint64_t> unmapped;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = &annotation.data[i * 3];
    const std::uint32_t key =
        mapping.rgb ? (std::uint32_t{p[0]} << 16) | (std::uint32_t{p[1]} << 8) | p[2] : std::uint32_t{p[0]};
    const auto it = table.find(key);
    if (it != table.end()) {
      labels[i] = static_cast<std::uint8_t>(it->second);
    } else {
      labels[i] = static_cast<std::uint8_t>(ClassId::background);
      ++unmapped[key];
    }
  }
  if (options.strict && !unmapped.empty()) {
    throw Error(Errc::unknown_source_class, "source value " + std::to_string(unmapped.begin()->first) +
                                                " has no mapping (" + std::to_string(unmapped.begin()->second) +
                                                " pixels)");
  }
  for (const auto& [k, v] : unmapped) report.unmapped[k] += v;
  return ClassMap(annotation.width, annotation.height, std::move(labels));
}

ImportReport import_dataset(Project& project, const fs::path& src, const ClassMapping& mapping,
                            const ImportOptions& options) {
  if (!fs::is_directory(src)) throw MissingAsset(src.string());
  if (mapping.mask_suffix.empty()) throw bad_config("/mask_suffix", "must not be empty");

  std::vector<SourceFrame> found;
  for (const auto& entry : fs::recursive_directory_iterator(src)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.size() <= mapping.mask_suffix.size() ||
        name.compare(name.size() - mapping.mask_suffix.size(), mapping.mask_suffix.size(), mapping.mask_suffix) != 0) {
      continue;
    }
    const auto stem = name.substr(0, name.size() - mapping.mask_suffix.size());
    const auto index = trailing_number(stem);
    if (!index) continue;

    const auto rel = fs::relative(entry.path(), src);
    std::string video = rel.has_parent_path() ? rel.begin()->string() : src.filename().string();
    std::replace_if(video.begin(), video.end(), [](unsigned char c) { return !(std::isalnum(c) || c == '_' || c == '-' || c == '.'); }, '_');

    SourceFrame f;
    f.ref.video_id = video;
    f.ref.frame_index = *index;
    f.mask = entry.path();
    if (!mapping.image_suffix.empty()) f.image = entry.path().parent_path() / (stem + mapping.image_suffix);
    found.push_back(std::move(f));
  }
  std::sort(found.begin(), found.end(),
            [](const SourceFrame& a, const SourceFrame& b) { return frame_order_less(a.ref, b.ref); });
  found.erase(std::unique(found.begin(), found.end(),
                          [](const SourceFrame& a, const SourceFrame& b) {
                            return a.ref.video_id == b.ref.video_id && a.ref.frame_index == b.ref.frame_index;
                          }),
              found.end());

  ImportReport report;
  for (auto& f : found) {
    f.ref.timestamp_ms = static_cast<std::int64_t>(static_cast<double>(f.ref.frame_index) * 1000.0 / mapping.fps);
    if (project.find_frame(f.ref)) continue;

    const auto annotation = read_rgb(f.mask);
    auto map = remap_annotation(annotation, mapping, options, report);
    auto sections = sections_from_components(map);
    auto scene = fuse(map, sections);
    const auto image = !f.image.empty() && fs::exists(f.image) ? read_rgb(f.image) : render_class_map(scene.class_map);

    project.add_video({f.ref.video_id, mapping.fps});
    project.add_frame(f.ref, scene, image);
    ++report.frames;
  }
  return report;
}

}  // namespace surgq
