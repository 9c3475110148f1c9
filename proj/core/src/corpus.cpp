#include "surgq/corpus.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>

namespace surgq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kLockFile = ".surgq.lock";
constexpr const char* kIndexFile = "index.bin";
constexpr const char* kSubdirs[] = {"frames", "thumbs", "classmaps", "sections", "quizzes", "assets"};

Error corrupt(const std::string& where, const std::string& what) {
  return Error(Errc::corrupt_manifest, "manifest " + where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw corrupt(where + "/" + key, "missing");
  return *it;
}

std::string need_string(const json& j, const char* key, const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_string()) throw corrupt(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> maybe_string(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw corrupt(where + "/" + key, "expected a string");
  return it->get<std::string>();
}

std::int64_t need_int(const json& j, const char* key, const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_number_integer()) throw corrupt(where + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string frame_stem(const FrameRef& f) {
  char idx[24];
  std::snprintf(idx, sizeof(idx), "%06lld", static_cast<long long>(f.frame_index));
  return f.video_id + "_" + idx;
}

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= 0xFF;
  h *= 0x100000001b3ULL;
  return h;
}

// Reads and decodes a referenced file, turning decode failures into
// CorruptManifest while letting MissingAsset through.
template <typename F>
auto decode_asset(const fs::path& path, const std::string& rel, F&& decode) {
  const auto bytes = read_file(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw Error(Errc::corrupt_manifest, rel + ": " + e.what());
  }
}

}  // namespace

json to_json(const Manifest& m) {
  json videos = json::array();
  for (const auto& v : m.videos) videos.push_back({{"id", v.id}, {"fps", v.fps}});
  json frames = json::array();
  for (const auto& f : m.frames) {
    json j{{"video", f.frame.video_id},
           {"index", f.frame.frame_index},
           {"timestamp_ms", f.frame.timestamp_ms},
           {"image", f.image},
           {"thumb", f.thumb},
           {"class_map", f.class_map},
           {"sections", f.sections}};
    if (f.truth) j["truth"] = *f.truth;
    if (f.noisy) j["noisy"] = *f.noisy;
    frames.push_back(std::move(j));
  }
  json out{{"schema", kProjectSchema}, {"name", m.name},     {"width", m.width},  {"height", m.height},
           {"videos", std::move(videos)}, {"frames", std::move(frames)}, {"quizzes", m.quizzes}};
  if (m.features) out["features"] = *m.features;
  if (m.index) {
    out["index"] = {{"path", m.index->path},
                    {"grid", std::to_string(m.index->grid.width) + "x" + std::to_string(m.index->grid.height)},
                    {"fingerprint", m.index->fingerprint},
                    {"inventory", m.index->inventory}};
  }
  return out;
}

Manifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw corrupt("", "expected an object");
  const auto schema = need_string(j, "schema", "");
  if (schema != kProjectSchema) throw corrupt("/schema", "unsupported schema \"" + schema + "\"");

  Manifest m;
  m.name = need_string(j, "name", "");
  m.width = static_cast<int>(need_int(j, "width", ""));
  m.height = static_cast<int>(need_int(j, "height", ""));
  if (m.width < 1 || m.height < 1) throw corrupt("/width", "canvas must be at least 1x1");

  const auto& videos = need(j, "videos", "");
  if (!videos.is_array()) throw corrupt("/videos", "expected an array");
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const auto where = "/videos/" + std::to_string(i);
    VideoRecord v{need_string(videos[i], "id", where), 25.0};
    if (!is_safe_id(v.id)) throw corrupt(where + "/id", "invalid video id \"" + v.id + "\"");
    if (const auto fps = videos[i].find("fps"); fps != videos[i].end()) {
      if (!fps->is_number() || !(fps->get<double>() > 0)) throw corrupt(where + "/fps", "expected a positive number");
      v.fps = fps->get<double>();
    }
    m.videos.push_back(std::move(v));
  }

  const auto& frames = need(j, "frames", "");
  if (!frames.is_array()) throw corrupt("/frames", "expected an array");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto where = "/frames/" + std::to_string(i);
    const auto& fj = frames[i];
    if (!fj.is_object()) throw corrupt(where, "expected an object");
    FrameRecord f;
    f.frame.video_id = need_string(fj, "video", where);
    f.frame.frame_index = need_int(fj, "index", where);
    f.frame.timestamp_ms = need_int(fj, "timestamp_ms", where);
    f.image = need_string(fj, "image", where);
    f.thumb = need_string(fj, "thumb", where);
    f.class_map = need_string(fj, "class_map", where);
    f.sections = need_string(fj, "sections", where);
    f.truth = maybe_string(fj, "truth", where);
    f.noisy = maybe_string(fj, "noisy", where);
    const bool known = std::any_of(m.videos.begin(), m.videos.end(),
                                   [&](const VideoRecord& v) { return v.id == f.frame.video_id; });
    if (!known) throw corrupt(where + "/video", "video \"" + f.frame.video_id + "\" not listed");
    if (!m.frames.empty() && !frame_order_less(m.frames.back().frame, f.frame)) {
      throw corrupt(where, "frame inventory not sorted by (video, index)");
    }
    m.frames.push_back(std::move(f));
  }
  std::vector<FrameRef> refs;
  refs.reserve(m.frames.size());
  for (const auto& f : m.frames) refs.push_back(f.frame);
  try {
    check_frame_sequence(refs);
  } catch (const Error& e) {
    throw corrupt("/frames", e.what());
  }

  m.features = maybe_string(j, "features", "");
  if (const auto it = j.find("index"); it != j.end() && !it->is_null()) {
    IndexRecord r;
    r.path = need_string(*it, "path", "/index");
    try {
      r.grid = parse_grid(need_string(*it, "grid", "/index"));
    } catch (const Error& e) {
      throw corrupt("/index/grid", e.what());
    }
    r.fingerprint = need_string(*it, "fingerprint", "/index");
    r.inventory = need_string(*it, "inventory", "/index");
    m.index = std::move(r);
  }
  if (const auto it = j.find("quizzes"); it != j.end()) {
    if (!it->is_array()) throw corrupt("/quizzes", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& q = (*it)[i];
      if (!q.is_string() || !is_safe_id(q.get<std::string>())) {
        throw corrupt("/quizzes/" + std::to_string(i), "expected a quiz id");
      }
      m.quizzes.push_back(q.get<std::string>());
    }
  }
  return m;
}

std::string inventory_fingerprint(const Manifest& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, std::to_string(m.width) + "x" + std::to_string(m.height));
  for (const auto& f : m.frames) {
    h = fnv1a(h, f.frame.video_id);
    h = fnv1a(h, std::to_string(f.frame.frame_index) + "@" + std::to_string(f.frame.timestamp_ms));
    h = fnv1a(h, f.class_map);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

WriterLock::WriterLock(const fs::path& root) {
  fd_ = ::open((root / kLockFile).c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(Errc::io_error, "cannot open lock file in " + root.string() + ": " + std::strerror(errno));
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno == EINTR) continue;
    const int err = errno;
    ::close(fd_);
    throw Error(Errc::io_error, std::string("cannot lock project: ") + std::strerror(err));
  }
}

WriterLock::~WriterLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::unique_ptr<WriterLock> WriterLock::try_acquire(const fs::path& root) {
  const int fd = ::open((root / kLockFile).c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(Errc::io_error, "cannot open lock file in " + root.string() + ": " + std::strerror(errno));
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd);
    return nullptr;
  }
  return std::unique_ptr<WriterLock>(new WriterLock(fd));
}

Project::Project(Project&& other) noexcept : root_(std::move(other.root_)), manifest_(std::move(other.manifest_)) {
  std::lock_guard lock(other.cache_mutex_);
  scene_cache_ = std::move(other.scene_cache_);
}

Project& Project::operator=(Project&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(cache_mutex_, other.cache_mutex_);
  root_ = std::move(other.root_);
  manifest_ = std::move(other.manifest_);
  scene_cache_ = std::move(other.scene_cache_);
  return *this;
}

Project Project::init(const fs::path& root, const std::string& name, int width, int height) {
  if (width < 1 || height < 1) throw Error(Errc::invalid_argument, "canvas must be at least 1x1");
  if (fs::exists(root / kManifestFile)) {
    throw Error(Errc::invalid_argument, "a project already exists at " + root.string());
  }
  fs::create_directories(root);
  for (const auto* d : kSubdirs) fs::create_directories(root / d);
  Project p(root);
  p.manifest_.name = name;
  p.manifest_.width = width;
  p.manifest_.height = height;
  p.save();
  return p;
}

Project Project::open(const fs::path& root) {
  const auto path = root / kManifestFile;
  const auto bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_manifest, path.string() + ": " + e.what());
  }
  Project p(root);
  p.manifest_ = manifest_from_json(j);
  return p;
}

Project Project::load(const fs::path& root) {
  auto p = open(root);
  p.validate_files();
  return p;
}

void Project::validate_files() const {
  const int w = manifest_.width;
  const int h = manifest_.height;
  auto check_dims = [&](int mw, int mh, const std::string& rel) {
    if (mw != w || mh != h) {
      throw Error(Errc::corrupt_manifest, rel + ": " + std::to_string(mw) + "x" + std::to_string(mh) +
                                              " does not match the " + std::to_string(w) + "x" +
                                              std::to_string(h) + " canvas");
    }
  };
  for (const auto& f : manifest_.frames) {
    auto cm = decode_asset(resolve(f.class_map), f.class_map,
                           [](const Bytes& b) { return decode_class_map_png(b); });
    check_dims(cm.width(), cm.height(), f.class_map);
    auto sm = decode_asset(resolve(f.sections), f.sections,
                           [](const Bytes& b) { return decode_section_mask_png(b); });
    check_dims(sm.width(), sm.height(), f.sections);
    try {
      const auto scene = FusedScene::assemble(std::move(cm), std::move(sm));
      if (same_class_adjacent_pairs(scene) != 0) {
        throw Error(Errc::corrupt_manifest, "adjacent sections share a class");
      }
    } catch (const Error& e) {
      throw Error(Errc::corrupt_manifest, f.class_map + ": " + e.what());
    }
    const auto img = decode_asset(resolve(f.image), f.image, [](const Bytes& b) { return decode_rgb_png(b); });
    check_dims(img.width, img.height, f.image);
    if (!fs::exists(resolve(f.thumb))) throw MissingAsset(resolve(f.thumb).string());
    for (const auto* extra : {&f.truth, &f.noisy}) {
      if (!*extra) continue;
      const auto m = decode_asset(resolve(**extra), **extra, [](const Bytes& b) { return decode_class_map_png(b); });
      check_dims(m.width(), m.height(), **extra);
    }
  }
  if (manifest_.features) {
    const auto series = decode_asset(resolve(*manifest_.features), *manifest_.features,
                                     [](const Bytes& b) { return decode_sfv(b); });
    if (series.size() != manifest_.frames.size()) {
      throw Error(Errc::corrupt_manifest, *manifest_.features + ": " + std::to_string(series.size()) +
                                              " feature rows for " + std::to_string(manifest_.frames.size()) +
                                              " frames");
    }
  }
  if (manifest_.index) {
    const auto index = decode_asset(resolve(manifest_.index->path), manifest_.index->path,
                                    [](const Bytes& b) { return decode_index(b); });
    if (index.fingerprint() != manifest_.index->fingerprint) {
      throw Error(Errc::corrupt_manifest, manifest_.index->path + ": fingerprint does not match the manifest");
    }
  }
  for (const auto& id : manifest_.quizzes) {
    try {
      (void)load_quiz(id);
    } catch (const MissingAsset&) {
      throw;
    } catch (const Error& e) {
      throw Error(Errc::corrupt_manifest, "quiz " + id + ": " + e.what());
    }
  }
}

void Project::save() const {
  WriterLock lock(root_);
  save(lock);
}

void Project::save(const WriterLock&) const {
  const auto text = to_json(manifest_).dump(2) + "\n";
  write_file_atomic(root_ / kManifestFile,
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

fs::path Project::resolve(const std::string& rel) const {
  const fs::path p(rel);
  if (rel.empty() || p.is_absolute()) throw Error(Errc::invalid_argument, "expected a project-relative path: " + rel);
  const auto norm = p.lexically_normal();
  if (norm.empty() || *norm.begin() == "..") throw Error(Errc::invalid_argument, "path escapes the project: " + rel);
  return root_ / norm;
}

bool Project::asset_exists(const std::string& rel) const {
  try {
    return fs::is_regular_file(resolve(rel));
  } catch (const Error&) {
    return false;
  }
}

const FrameRecord* Project::find_frame(const FrameRef& ref) const {
  const auto it = std::lower_bound(manifest_.frames.begin(), manifest_.frames.end(), ref,
                                   [](const FrameRecord& r, const FrameRef& f) { return frame_order_less(r.frame, f); });
  if (it == manifest_.frames.end() || it->frame.video_id != ref.video_id || it->frame.frame_index != ref.frame_index) {
    return nullptr;
  }
  return &*it;
}

const FrameRecord* Project::find_frame(const std::string& key) const {
  const auto colon = key.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == key.size()) return nullptr;
  FrameRef ref;
  ref.video_id = key.substr(0, colon);
  const auto digits = key.substr(colon + 1);
  if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }) ||
      digits.size() > 18) {
    return nullptr;
  }
  ref.frame_index = std::stoll(digits);
  return find_frame(ref);
}

std::shared_ptr<const FusedScene> Project::scene(const FrameRecord& rec) const {
  const auto key = rec.frame.key();
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = scene_cache_.find(key); it != scene_cache_.end()) return it->second;
  }
  auto scene = std::make_shared<const FusedScene>(
      FusedScene::assemble(read_class_map(resolve(rec.class_map)), read_section_mask(resolve(rec.sections))));
  std::lock_guard lock(cache_mutex_);
  return scene_cache_.emplace(key, std::move(scene)).first->second;
}

RgbImage Project::image(const FrameRecord& rec) const { return read_rgb(resolve(rec.image)); }

std::optional<FeatureSeries> Project::features() const {
  if (!manifest_.features) return std::nullopt;
  std::vector<FrameRef> refs;
  refs.reserve(manifest_.frames.size());
  for (const auto& f : manifest_.frames) refs.push_back(f.frame);
  return read_sfv(resolve(*manifest_.features), std::move(refs));
}

void Project::add_video(const VideoRecord& video) {
  if (!is_safe_id(video.id)) throw Error(Errc::invalid_argument, "invalid video id \"" + video.id + "\"");
  auto& vs = manifest_.videos;
  const auto it = std::find_if(vs.begin(), vs.end(), [&](const VideoRecord& v) { return v.id == video.id; });
  if (it != vs.end()) {
    *it = video;
  } else {
    vs.push_back(video);
  }
}

const FrameRecord& Project::add_frame(const FrameRef& ref, const FusedScene& scene, const RgbImage& image,
                                      const ClassMap* truth, const ClassMap* noisy) {
  if (!is_safe_id(ref.video_id)) throw Error(Errc::invalid_argument, "invalid video id \"" + ref.video_id + "\"");
  const int w = manifest_.width;
  const int h = manifest_.height;
  auto same = [&](int mw, int mh) { return mw == w && mh == h; };
  if (!same(scene.class_map.width(), scene.class_map.height()) || !same(image.width, image.height) ||
      (truth && !same(truth->width(), truth->height())) || (noisy && !same(noisy->width(), noisy->height()))) {
    throw Error(Errc::dimension_mismatch, "frame " + ref.key() + " does not match the project canvas");
  }
  if (!manifest_.frames.empty()) {
    const auto& last = manifest_.frames.back().frame;
    if (!frame_order_less(last, ref)) {
      throw Error(Errc::invalid_argument, "frame " + ref.key() + " added out of order after " + last.key());
    }
    if (last.video_id == ref.video_id && last.timestamp_ms >= ref.timestamp_ms) {
      throw Error(Errc::invalid_argument, "frame " + ref.key() + " does not advance the timestamp");
    }
  }
  if (std::none_of(manifest_.videos.begin(), manifest_.videos.end(),
                   [&](const VideoRecord& v) { return v.id == ref.video_id; })) {
    add_video({ref.video_id, 25.0});
  }

  const auto stem = frame_stem(ref);
  FrameRecord rec;
  rec.frame = ref;
  rec.image = "frames/" + stem + ".png";
  rec.thumb = "thumbs/" + stem + ".jpg";
  rec.class_map = "classmaps/" + stem + ".png";
  rec.sections = "sections/" + stem + ".png";
  write_rgb(resolve(rec.image), image);
  const auto thumb = encode_jpeg(resize_to_width(image, std::min(kThumbWidth, image.width)));
  write_file(resolve(rec.thumb), thumb);
  write_class_map(resolve(rec.class_map), scene.class_map);
  write_section_mask(resolve(rec.sections), scene.section_mask);
  if (truth) {
    fs::create_directories(root_ / "truth");
    rec.truth = "truth/" + stem + ".png";
    write_class_map(resolve(*rec.truth), *truth);
  }
  if (noisy) {
    fs::create_directories(root_ / "noisy");
    rec.noisy = "noisy/" + stem + ".png";
    write_class_map(resolve(*rec.noisy), *noisy);
  }
  manifest_.frames.push_back(std::move(rec));
  return manifest_.frames.back();
}

FrameIndex Project::rebuild_index(GridSize grid) {
  if (manifest_.frames.empty()) throw Error(Errc::empty_corpus, "project has no frames to index");
  IndexBuilder builder(grid);
  for (const auto& f : manifest_.frames) builder.add(f.frame, read_class_map(resolve(f.class_map)));
  auto index = std::move(builder).build();
  write_index(root_ / kIndexFile, index);
  manifest_.index = IndexRecord{kIndexFile, grid, index.fingerprint(), inventory_fingerprint(manifest_)};
  return index;
}

bool Project::index_stale() const {
  return !manifest_.index || manifest_.index->inventory != inventory_fingerprint(manifest_) ||
         !fs::exists(resolve(manifest_.index->path));
}

std::optional<FrameIndex> Project::current_index() const {
  if (index_stale()) return std::nullopt;
  auto index = read_index(resolve(manifest_.index->path));
  if (index.fingerprint() != manifest_.index->fingerprint) return std::nullopt;
  return index;
}

QuestionContext Project::question_context() const {
  QuestionContext ctx;
  ctx.scene = [this](const FrameRef& ref) -> const FusedScene* {
    const auto* rec = find_frame(ref);
    return rec ? scene(*rec).get() : nullptr;
  };
  ctx.asset_exists = [this](const std::string& rel) { return asset_exists(rel); };
  return ctx;
}

Quiz Project::load_quiz(const std::string& id) const {
  if (!is_safe_id(id)) throw Error(Errc::invalid_argument, "invalid quiz id \"" + id + "\"");
  const auto path = root_ / "quizzes" / (id + ".json");
  const auto bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw ParseError("", e.what());
  }
  return quiz_from_json(j);
}

void Project::store_quiz(const Quiz& quiz) {
  if (!is_safe_id(quiz.id)) throw Error(Errc::invalid_argument, "invalid quiz id \"" + quiz.id + "\"");
  fs::create_directories(root_ / "quizzes");
  const auto text = to_json(quiz).dump(2) + "\n";
  write_file_atomic(root_ / "quizzes" / (quiz.id + ".json"),
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  auto& ids = manifest_.quizzes;
  if (std::find(ids.begin(), ids.end(), quiz.id) == ids.end()) {
    ids.push_back(quiz.id);
    std::sort(ids.begin(), ids.end());
  }
}

bool Project::remove_quiz(const std::string& id) {
  auto& ids = manifest_.quizzes;
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return false;
  ids.erase(it);
  fs::remove(root_ / "quizzes" / (id + ".json"));
  return true;
}

std::map<std::string, std::vector<const FrameRecord*>> frames_by_video(const Manifest& m) {
  std::map<std::string, std::vector<const FrameRecord*>> out;
  for (const auto& f : m.frames) out[f.frame.video_id].push_back(&f);
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace surgq
