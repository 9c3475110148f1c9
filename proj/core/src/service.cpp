#include "surgq/service.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "httplib.h"
#include "surgq/geometry.hpp"
#include "surgq/highlight.hpp"
#include "surgq/polygon_json.hpp"

namespace surgq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ApiResponse ok(json body, int status = 200) { return {status, std::move(body), {}, "application/json"}; }

ApiResponse binary(std::string bytes, std::string type) { return {200, nullptr, std::move(bytes), std::move(type)}; }

std::string frame_url(const FrameRef& ref, const char* what) { return "/frames/" + ref.key() + "/" + what; }

std::string read_bytes(const fs::path& path) {
  const auto b = read_file(path);
  return std::string(b.begin(), b.end());
}

std::string content_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".json") return "application/json";
  return "application/octet-stream";
}

const json& require_object(const json& body) {
  if (!body.is_object()) throw ParseError("", "expected a JSON object");
  return body;
}

std::int64_t integer_field(const json& body, const char* key, std::int64_t fallback, std::int64_t min) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < min) {
    throw ParseError(std::string("/") + key, "expected an integer >= " + std::to_string(min));
  }
  return it->get<std::int64_t>();
}

std::vector<Point> points_from_json(const json& j, const std::string& path) {
  return ring_from_json(j, path, 0);
}

std::string next_quiz_id(const std::vector<std::string>& taken) {
  for (int n = 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "quiz-%04d", n);
    if (std::find(taken.begin(), taken.end(), buf) == taken.end()) return buf;
  }
}

std::string hash_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::invalid_argument:
    case Errc::dimension_mismatch:
    case Errc::invalid_class_id:
    case Errc::grid_mismatch:
    case Errc::invalid_grid:
    case Errc::path_too_short:
    case Errc::unknown_option:
    case Errc::degenerate_ring:
    case Errc::empty_region:
    case Errc::ragged_judgments:
    case Errc::length_mismatch:
    case Errc::invalid_spec:
      return 400;
    case Errc::validation_failed:
    case Errc::dangling_frame_ref:
    case Errc::dangling_section:
    case Errc::empty_correct_set:
      return 422;
    case Errc::not_found:
    case Errc::missing_asset:
      return 404;
    case Errc::stale_index:
    case Errc::empty_index:
    case Errc::conflict:
      return 409;
    case Errc::backend_unavailable:
      return 502;
    default:
      return 500;
  }
}

json error_body(const Error& e) {
  json err{{"code", std::string(errc_name(e.code()))}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) err["path"] = pe->path().empty() ? "/" : pe->path();
  if (const auto* vf = dynamic_cast<const ValidationFailed*>(&e)) {
    json issues = json::array();
    for (const auto& i : vf->issues()) {
      issues.push_back({{"code", std::string(errc_name(i.code))}, {"path", i.path}, {"message", i.message}});
    }
    err["issues"] = std::move(issues);
  }
  return {{"error", std::move(err)}};
}

json frame_summary(const FrameRef& ref, bool keyframe) {
  return {{"id", ref.key()},
          {"video", ref.video_id},
          {"index", ref.frame_index},
          {"timestamp_ms", ref.timestamp_ms},
          {"keyframe", keyframe},
          {"image", frame_url(ref, "image")},
          {"thumb", frame_url(ref, "thumb")}};
}

json search_payload(const SearchResult& result, const std::string& index_fingerprint) {
  json hits = json::array();
  for (const auto& h : result.hits) {
    hits.push_back({{"id", h.frame.key()},
                    {"video", h.frame.video_id},
                    {"index", h.frame.frame_index},
                    {"timestamp_ms", h.frame.timestamp_ms},
                    {"distance", h.distance},
                    {"thumb", frame_url(h.frame, "thumb")}});
  }
  return {{"grid", std::to_string(result.grid.width) + "x" + std::to_string(result.grid.height)},
          {"k", result.options.k},
          {"min_gap_ms", result.options.min_gap_ms},
          {"index", index_fingerprint},
          {"results", std::move(hits)}};
}

ApiResponse Api::guarded(const std::function<ApiResponse()>& handler) {
  try {
    return handler();
  } catch (const ValidationFailed& e) {
    return ok(error_body(e), 422);
  } catch (const Error& e) {
    return ok(error_body(e), http_status(e.code()));
  } catch (const json::exception& e) {
    return ok(error_body(ParseError("", e.what())), 400);
  } catch (const std::exception& e) {
    return ok(error_body(Error(Errc::io_error, e.what())), 500);
  }
}

Api::Api(Project project, ServiceConfig config) : project_(std::move(project)), config_(std::move(config)) {
  if (auto index = project_.current_index()) index_ = std::make_shared<const FrameIndex>(std::move(*index));
  compute_keyframes();
}

void Api::compute_keyframes() {
  const auto& frames = project_.manifest().frames;
  keyframe_flags_.assign(frames.size(), false);
  std::optional<FeatureSeries> features;
  try {
    features = project_.features();
  } catch (const Error& e) {
    if (config_.log) config_.log(std::string("keyframes unavailable: ") + e.what());
    return;
  }
  if (!features) return;

  // Keyframes are found per recording.
  std::size_t begin = 0;
  while (begin < frames.size()) {
    std::size_t end = begin;
    while (end < frames.size() && frames[end].frame.video_id == frames[begin].frame.video_id) ++end;
    const auto dims = features->dims();
    std::vector<float> rows(features->values().begin() + static_cast<std::ptrdiff_t>(begin * dims),
                            features->values().begin() + static_cast<std::ptrdiff_t>(end * dims));
    std::vector<FrameRef> refs;
    for (std::size_t i = begin; i < end; ++i) refs.push_back(frames[i].frame);
    try {
      const FeatureSeries series(dims, std::move(rows), std::move(refs));
      for (auto k : keyframe_indices(series, config_.keyframes)) keyframe_flags_[begin + k] = true;
    } catch (const Error& e) {
      if (config_.log) config_.log("keyframes for " + frames[begin].frame.video_id + ": " + e.what());
    }
    begin = end;
  }
}

const FrameRecord& Api::frame_or_throw(const std::string& id) const {
  const auto* rec = project_.find_frame(id);
  if (!rec) throw Error(Errc::not_found, "unknown frame " + id);
  return *rec;
}

bool Api::index_stale() const {
  std::shared_lock lock(state_mutex_);
  std::lock_guard ilock(index_mutex_);
  return !index_ || project_.index_stale();
}

std::shared_ptr<const FrameIndex> Api::index_snapshot() const {
  std::lock_guard lock(index_mutex_);
  return index_;
}

ApiResponse Api::list_frames() const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    json frames = json::array();
    const auto& m = project_.manifest();
    for (std::size_t i = 0; i < m.frames.size(); ++i) frames.push_back(frame_summary(m.frames[i].frame, keyframe_flags_[i]));
    return ok({{"width", m.width}, {"height", m.height}, {"frames", std::move(frames)}});
  });
}

ApiResponse Api::keyframes() const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    json frames = json::array();
    const auto& m = project_.manifest();
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
      if (keyframe_flags_[i]) frames.push_back(frame_summary(m.frames[i].frame, true));
    }
    return ok({{"keyframes", std::move(frames)}});
  });
}

ApiResponse Api::frame_polygons(const std::string& id) const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    const auto scene = project_.scene(frame_or_throw(id));
    return ok(to_json(extract_polygons(*scene)));
  });
}

ApiResponse Api::frame_image(const std::string& id) const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    const auto& rec = frame_or_throw(id);
    return binary(read_bytes(project_.resolve(rec.image)), "image/png");
  });
}

ApiResponse Api::frame_thumb(const std::string& id) const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    const auto& rec = frame_or_throw(id);
    return binary(read_bytes(project_.resolve(rec.thumb)), "image/jpeg");
  });
}

ApiResponse Api::frame_highlight(const std::string& id, const json& body) const {
  return guarded([&] {
    require_object(body);
    std::shared_lock lock(state_mutex_);
    const auto& rec = frame_or_throw(id);
    const auto it = body.find("anchor");
    if (it == body.end()) throw ParseError("/anchor", "missing");
    const auto anchor = anchor_from_json(*it, "/anchor");
    auto style = HighlightStyle::fill;
    if (const auto s = body.find("style"); s != body.end()) {
      const auto parsed = s->is_string() ? style_from_name(s->get<std::string>()) : std::nullopt;
      if (!parsed) throw ParseError("/style", "expected \"fill\", \"outline\" or \"arrow\"");
      style = *parsed;
    }
    const auto scene = project_.scene(rec);
    const auto out = render_highlight(project_.image(rec), *scene, anchor, style);
    const auto png = encode_rgb_png(out.image);
    return binary(std::string(png.begin(), png.end()), "image/png");
  });
}

ApiResponse Api::search(const json& body) const {
  return guarded([&] {
    require_object(body);
    const auto sit = body.find("scene");
    if (sit == body.end()) throw ParseError("/scene", "missing");
    const auto scene = polygon_scene_from_json(*sit, "/scene");

    SearchOptions opts;
    opts.k = static_cast<std::size_t>(integer_field(body, "k", 9, 1));
    opts.min_gap_ms = integer_field(body, "min_gap_ms", 2000, 0);
    if (const auto v = body.find("video"); v != body.end() && !v->is_null()) {
      if (!v->is_string()) throw ParseError("/video", "expected a video id");
      opts.video_id = v->get<std::string>();
    }

    std::shared_ptr<const FrameIndex> index;
    {
      std::shared_lock lock(state_mutex_);
      const auto& m = project_.manifest();
      if (scene.width != m.width) throw ParseError("/scene/width", "expected the project width " + std::to_string(m.width));
      if (scene.height != m.height) {
        throw ParseError("/scene/height", "expected the project height " + std::to_string(m.height));
      }
      index = index_snapshot();
      if (!index || project_.index_stale()) {
        throw Error(Errc::stale_index, "search index is missing or out of date; POST /index/rebuild");
      }
    }
    return ok(search_payload(surgq::search(*index, scene, opts), index->fingerprint()));
  });
}

ApiResponse Api::rebuild_index() {
  return guarded([&] {
    std::unique_lock lock(state_mutex_);
    WriterLock writer(project_.root());
    const auto grid = project_.manifest().index ? project_.manifest().index->grid : kDefaultIndexGrid;
    auto index = std::make_shared<const FrameIndex>(project_.rebuild_index(grid));
    project_.save(writer);
    {
      std::lock_guard ilock(index_mutex_);
      index_ = index;
    }
    return ok({{"fingerprint", index->fingerprint()},
               {"frames", index->size()},
               {"grid", std::to_string(grid.width) + "x" + std::to_string(grid.height)}});
  });
}

ApiResponse Api::feedback_starters() const {
  return guarded([&] {
    const auto path = project_.root() / "feedback_starters.json";
    if (!fs::exists(path)) return ok({{"starters", default_feedback_starters()}, {"source", "default"}});
    const auto bytes = read_file(path);
    json j;
    try {
      j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
      throw Error(Errc::corrupt_manifest, "feedback_starters.json: " + std::string(e.what()));
    }
    return ok({{"starters", feedback_starters_from_json(j)}, {"source", "project"}});
  });
}

ApiResponse Api::list_quizzes() const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    json out = json::array();
    for (const auto& id : project_.quiz_ids()) {
      const auto q = project_.load_quiz(id);
      out.push_back({{"id", q.id},
                     {"title", q.title},
                     {"author", q.author},
                     {"questions", q.questions.size()},
                     {"modified_at", q.modified_at}});
    }
    return ok({{"quizzes", std::move(out)}});
  });
}

ApiResponse Api::get_quiz(const std::string& id) const {
  return guarded([&] {
    std::shared_lock lock(state_mutex_);
    const auto ids = project_.quiz_ids();
    if (!is_safe_id(id) || std::find(ids.begin(), ids.end(), id) == ids.end()) {
      throw Error(Errc::not_found, "unknown quiz " + id);
    }
    return ok(to_json(project_.load_quiz(id)));
  });
}

ApiResponse Api::create_quiz(const json& body) {
  return guarded([&] {
    auto quiz = quiz_from_json(require_object(body));
    std::unique_lock lock(state_mutex_);
    WriterLock writer(project_.root());
    const auto ids = project_.quiz_ids();
    if (quiz.id.empty()) quiz.id = next_quiz_id(ids);
    if (std::find(ids.begin(), ids.end(), quiz.id) != ids.end()) {
      throw Error(Errc::conflict, "quiz " + quiz.id + " already exists");
    }
    quiz.created_at = quiz.modified_at = utc_now();
    require_valid(quiz, project_.question_context());
    project_.store_quiz(quiz);
    project_.save(writer);
    return ok(to_json(quiz), 201);
  });
}

ApiResponse Api::update_quiz(const std::string& id, const json& body) {
  return guarded([&] {
    auto quiz = quiz_from_json(require_object(body));
    if (!quiz.id.empty() && quiz.id != id) throw ParseError("/id", "does not match the URL");
    quiz.id = id;
    std::unique_lock lock(state_mutex_);
    WriterLock writer(project_.root());
    const auto ids = project_.quiz_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw Error(Errc::not_found, "unknown quiz " + id);
    quiz.created_at = project_.load_quiz(id).created_at;
    quiz.modified_at = utc_now();
    require_valid(quiz, project_.question_context());
    project_.store_quiz(quiz);
    project_.save(writer);
    return ok(to_json(quiz));
  });
}

ApiResponse Api::delete_quiz(const std::string& id) {
  return guarded([&] {
    std::unique_lock lock(state_mutex_);
    WriterLock writer(project_.root());
    if (!is_safe_id(id) || !project_.remove_quiz(id)) throw Error(Errc::not_found, "unknown quiz " + id);
    project_.save(writer);
    return ok({{"deleted", id}});
  });
}

ApiResponse Api::grade(const std::string& quiz_id, const json& body) const {
  return guarded([&] {
    require_object(body);
    const auto qi = static_cast<std::size_t>(integer_field(body, "question", -1, 0));
    if (!body.contains("question")) throw ParseError("/question", "missing");
    const auto ait = body.find("answer");
    if (ait == body.end() || !ait->is_object()) throw ParseError("/answer", "expected an object");
    const auto& answer = *ait;

    Quiz quiz;
    {
      std::shared_lock lock(state_mutex_);
      const auto ids = project_.quiz_ids();
      if (!is_safe_id(quiz_id) || std::find(ids.begin(), ids.end(), quiz_id) == ids.end()) {
        throw Error(Errc::not_found, "unknown quiz " + quiz_id);
      }
      quiz = project_.load_quiz(quiz_id);
    }
    if (qi >= quiz.questions.size()) throw Error(Errc::not_found, "quiz has no question " + std::to_string(qi));
    const auto& q = quiz.questions[qi];

    if (const auto* mcq = std::get_if<Mcq>(&q)) {
      const auto cit = answer.find("chosen");
      if (cit == answer.end() || !cit->is_array()) throw ParseError("/answer/chosen", "expected an array");
      std::vector<std::size_t> chosen;
      for (std::size_t i = 0; i < cit->size(); ++i) {
        if (!is_index((*cit)[i])) {
          throw ParseError("/answer/chosen/" + std::to_string(i), "expected an option index");
        }
        chosen.push_back((*cit)[i].get<std::size_t>());
      }
      const auto g = grade_mcq(*mcq, chosen);
      json fb = json::array();
      for (const auto& f : g.feedback) fb.push_back(to_json(f));
      return ok({{"type", "mcq"}, {"correct", g.correct}, {"feedback", std::move(fb)}});
    }
    if (const auto* path = std::get_if<DrawPath>(&q)) {
      const auto pit = answer.find("path");
      if (pit == answer.end()) throw ParseError("/answer/path", "missing");
      const auto student = points_from_json(*pit, "/answer/path");
      const auto g = grade_path(*path, student);
      return ok({{"type", "path"}, {"distance", g.distance}, {"score", g.score}, {"pass", g.pass}});
    }
    const auto& ex = std::get<ExtractComponent>(q);
    const auto tool = integer_field(answer, "tool", -1, 0);
    if (tool < 0) throw ParseError("/answer/tool", "missing");
    const auto pl = answer.find("placement");
    if (pl == answer.end() || !pl->is_array() || pl->size() != 2 || !(*pl)[0].is_number() || !(*pl)[1].is_number()) {
      throw ParseError("/answer/placement", "expected [x, y]");
    }
    const auto g = grade_extract(ex, static_cast<std::size_t>(tool), {(*pl)[0].get<double>(), (*pl)[1].get<double>()});
    return ok({{"type", "extract"},
               {"tool_correct", g.tool_correct},
               {"placement_correct", g.placement_correct},
               {"correct", g.correct}});
  });
}

ApiResponse Api::inpaint(const json& body) {
  return guarded([&] {
    require_object(body);
    const auto fit = body.find("frame");
    if (fit == body.end() || !fit->is_string()) throw ParseError("/frame", "expected a frame id");
    const auto mit = body.find("mask");
    if (mit == body.end()) throw ParseError("/mask", "missing");
    const auto anchor = anchor_from_json(*mit, "/mask");

    RgbImage image;
    std::vector<std::uint8_t> mask;
    FrameRef ref;
    {
      std::shared_lock lock(state_mutex_);
      const auto& rec = frame_or_throw(fit->get<std::string>());
      ref = rec.frame;
      mask = anchor_mask(anchor, *project_.scene(rec));
      image = project_.image(rec);
    }

    json warnings = json::array();
    auto backend = make_inpainter(config_.inpaint_url, [&](const std::string& w) {
      warnings.push_back(w);
      if (config_.log) config_.log(w);
    });
    const auto result = surgq::inpaint(*backend, image, mask);
    const auto png = encode_rgb_png(result);

    char idx[24];
    std::snprintf(idx, sizeof(idx), "%06lld", static_cast<long long>(ref.frame_index));
    const auto rel = "assets/inpaint/" + ref.video_id + "_" + idx + "-" + hash_hex(mask) + ".png";
    {
      std::unique_lock lock(state_mutex_);
      WriterLock writer(project_.root());
      fs::create_directories(project_.resolve(rel).parent_path());
      write_file_atomic(project_.resolve(rel), png);
    }
    return ok({{"asset", rel}, {"url", "/" + rel}, {"backend", backend->name()}, {"warnings", std::move(warnings)}},
              201);
  });
}

ApiResponse Api::asset(const std::string& rel) const {
  return guarded([&] {
    const auto path = project_.resolve("assets/" + rel);
    const auto base = (project_.root() / "assets").lexically_normal();
    const auto rel_to_base = path.lexically_normal().lexically_relative(base);
    if (rel_to_base.empty() || *rel_to_base.begin() == ".." || !fs::is_regular_file(path)) {
      throw Error(Errc::not_found, "no asset " + rel);
    }
    return binary(read_bytes(path), content_type_for(path));
  });
}

BindAddress parse_bind_address(const std::string& text) {
  BindAddress a;
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::invalid_argument, "expected host:port, got \"" + text + "\"");
  if (colon > 0) a.host = text.substr(0, colon);
  const auto port = text.substr(colon + 1);
  if (port.empty() || port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit) || std::stoi(port) > 65535) {
    throw Error(Errc::invalid_argument, "invalid port in \"" + text + "\"");
  }
  a.port = std::stoi(port);
  return a;
}

struct Server::Impl {
  Api& api;
  httplib::Server http;

  explicit Impl(Api& a) : api(a) {}

  static void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    if (r.is_json()) {
      res.set_content(r.body.dump(), "application/json");
    } else {
      res.set_content(r.bytes, r.content_type);
    }
  }

  static ApiResponse with_body(const httplib::Request& req, const std::function<ApiResponse(const json&)>& fn) {
    return Api::guarded([&] {
      json body;
      try {
        body = req.body.empty() ? json::object() : json::parse(req.body);
      } catch (const json::exception& e) {
        throw ParseError("", e.what());
      }
      return fn(body);
    });
  }

  void routes() {
    using Req = httplib::Request;
    using Res = httplib::Response;
    http.Get("/frames", [this](const Req&, Res& res) { send(res, api.list_frames()); });
    http.Get("/keyframes", [this](const Req&, Res& res) { send(res, api.keyframes()); });
    http.Get("/feedback-starters", [this](const Req&, Res& res) { send(res, api.feedback_starters()); });
    http.Get(R"(/frames/([^/]+)/polygons)",
             [this](const Req& req, Res& res) { send(res, api.frame_polygons(req.matches[1])); });
    http.Get(R"(/frames/([^/]+)/image)", [this](const Req& req, Res& res) { send(res, api.frame_image(req.matches[1])); });
    http.Get(R"(/frames/([^/]+)/thumb)", [this](const Req& req, Res& res) { send(res, api.frame_thumb(req.matches[1])); });
    http.Post(R"(/frames/([^/]+)/highlight)", [this](const Req& req, Res& res) {
      const std::string id = req.matches[1];
      send(res, with_body(req, [&](const json& b) { return api.frame_highlight(id, b); }));
    });
    http.Post("/search", [this](const Req& req, Res& res) {
      send(res, with_body(req, [&](const json& b) { return api.search(b); }));
    });
    http.Post("/index/rebuild", [this](const Req&, Res& res) { send(res, api.rebuild_index()); });
    http.Get("/quizzes", [this](const Req&, Res& res) { send(res, api.list_quizzes()); });
    http.Post("/quizzes", [this](const Req& req, Res& res) {
      send(res, with_body(req, [&](const json& b) { return api.create_quiz(b); }));
    });
    http.Get(R"(/quizzes/([^/]+))", [this](const Req& req, Res& res) { send(res, api.get_quiz(req.matches[1])); });
    http.Put(R"(/quizzes/([^/]+))", [this](const Req& req, Res& res) {
      const std::string id = req.matches[1];
      send(res, with_body(req, [&](const json& b) { return api.update_quiz(id, b); }));
    });
    http.Delete(R"(/quizzes/([^/]+))", [this](const Req& req, Res& res) { send(res, api.delete_quiz(req.matches[1])); });
    http.Post(R"(/quizzes/([^/]+)/grade)", [this](const Req& req, Res& res) {
      const std::string id = req.matches[1];
      send(res, with_body(req, [&](const json& b) { return api.grade(id, b); }));
    });
    http.Post("/inpaint", [this](const Req& req, Res& res) {
      send(res, with_body(req, [&](const json& b) { return api.inpaint(b); }));
    });
    http.Get(R"(/assets/(.+))", [this](const Req& req, Res& res) { send(res, api.asset(req.matches[1])); });
  }
};

Server::Server(Api& api) : impl_(std::make_unique<Impl>(api)) { impl_->routes(); }

Server::~Server() { stop(); }

int Server::bind(const BindAddress& address) {
  int port = address.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(address.host);
  } else if (!impl_->http.bind_to_port(address.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(Errc::io_error, "cannot bind " + address.host + ":" + std::to_string(address.port));
  }
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace surgq
