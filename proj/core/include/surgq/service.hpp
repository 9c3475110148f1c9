#pragma once

// HTTP facade over a loaded project. Api holds the request handling and
// returns plain payloads; Server only maps routes onto it, so the same calls
// can be exercised in-process.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surgq/corpus.hpp"
#include "surgq/inpaint.hpp"
#include "surgq/keyframes.hpp"
#include "surgq/search.hpp"

namespace surgq {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;          // used when content_type is JSON
  std::string bytes;            // raw payload otherwise
  std::string content_type = "application/json";

  bool is_json() const { return content_type == "application/json"; }
};

struct ServiceConfig {
  std::string inpaint_url;
  KeyframeConfig keyframes;
  std::function<void(const std::string&)> log;
};

/// HTTP status for an engine error code.
int http_status(Errc code);
/// {"error": {"code", "message", "path"?, "issues"?}}
nlohmann::json error_body(const Error& e);

class Api {
 public:
  /// Takes ownership of the project. Loads the persisted index when it is
  /// current and computes keyframes from the feature file when present.
  explicit Api(Project project, ServiceConfig config = {});

  ApiResponse list_frames() const;
  ApiResponse keyframes() const;
  ApiResponse frame_polygons(const std::string& id) const;
  ApiResponse frame_image(const std::string& id) const;
  ApiResponse frame_thumb(const std::string& id) const;
  /// Body {"anchor": {...}, "style": "fill"}; responds with a PNG.
  ApiResponse frame_highlight(const std::string& id, const nlohmann::json& body) const;

  /// Body {"scene": polygon scene, "k"?, "min_gap_ms"?, "video"?}.
  ApiResponse search(const nlohmann::json& body) const;
  ApiResponse rebuild_index();

  /// Project feedback_starters.json when present, else the built-in list.
  ApiResponse feedback_starters() const;

  ApiResponse list_quizzes() const;
  ApiResponse get_quiz(const std::string& id) const;
  ApiResponse create_quiz(const nlohmann::json& body);
  ApiResponse update_quiz(const std::string& id, const nlohmann::json& body);
  ApiResponse delete_quiz(const std::string& id);
  /// Body {"question": i, "answer": {...}} where the answer is
  /// {"chosen": [...]}, {"path": [[x, y], ...]} or {"tool": i, "placement": [x, y]}.
  ApiResponse grade(const std::string& quiz_id, const nlohmann::json& body) const;

  /// Body {"frame": id, "mask": {"section": n} | {"ring": [...]}}. Writes the
  /// result under assets/inpaint/ and returns its project-relative path.
  ApiResponse inpaint(const nlohmann::json& body);

  /// Serves a file below assets/; 404 for anything outside it.
  ApiResponse asset(const std::string& rel) const;

  /// Runs a handler, converting engine errors into error responses.
  static ApiResponse guarded(const std::function<ApiResponse()>& handler);

  bool index_stale() const;
  std::shared_ptr<const FrameIndex> index_snapshot() const;
  const Project& project() const { return project_; }

 private:
  const FrameRecord& frame_or_throw(const std::string& id) const;
  void compute_keyframes();

  Project project_;
  ServiceConfig config_;
  mutable std::shared_mutex state_mutex_;  // guards project_ manifest and keyframes_
  mutable std::mutex index_mutex_;
  std::shared_ptr<const FrameIndex> index_;
  std::vector<bool> keyframe_flags_;
};

/// JSON wire shape of one frame in listings.
nlohmann::json frame_summary(const FrameRef& ref, bool keyframe);
/// JSON wire shape of search results.
nlohmann::json search_payload(const SearchResult& result, const std::string& index_fingerprint);

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Parses "host:port" or ":port".
BindAddress parse_bind_address(const std::string& text);

class Server {
 public:
  explicit Server(Api& api);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; port 0 picks a free port. Throws Error(io_error) on bind failure.
  int bind(const BindAddress& address);
  /// Blocks serving requests until stop().
  void run();
  /// Stops accepting and lets in-flight requests finish.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace surgq
