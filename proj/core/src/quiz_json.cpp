#include <cmath>

#include "surgq/polygon_json.hpp"
#include "surgq/quiz.hpp"

namespace surgq {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "/" + key, "missing");
  return *it;
}

std::string string_field(const json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!v.is_string()) throw ParseError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::string optional_string(const json& j, const char* key, const std::string& path) {
  return j.contains(key) ? string_field(j, key, path) : std::string();
}

std::uint32_t u32_field(const json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  if (!is_index(v) || v.get<std::uint64_t>() > 0xFFFFFFFFu) {
    throw ParseError(path + "/" + key, "expected a non-negative integer");
  }
  return v.get<std::uint32_t>();
}

std::vector<std::size_t> index_list(const json& j, const char* key, const std::string& path) {
  const auto& v = field(j, key, path);
  const auto p = path + "/" + key;
  if (!v.is_array()) throw ParseError(p, "expected an array of indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!is_index(v[i])) throw ParseError(p + "/" + std::to_string(i), "expected a non-negative integer");
    out.push_back(v[i].get<std::size_t>());
  }
  return out;
}

std::vector<std::string> string_list(const json& j, const char* key, const std::string& path) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  const auto p = path + "/" + key;
  if (!v.is_array()) throw ParseError(p, "expected an array of strings");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(p + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

json points_to_json(std::span<const Point> pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

}  // namespace

json to_json(const RegionAnchor& a) {
  if (const auto* s = std::get_if<SectionAnchor>(&a)) return {{"section", s->section}};
  return {{"ring", ring_to_json(std::get<Ring>(a))}};
}

RegionAnchor anchor_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected {\"section\": n} or {\"ring\": [...]}");
  const bool has_section = j.contains("section");
  const bool has_ring = j.contains("ring");
  if (has_section == has_ring) throw ParseError(path, "exactly one of \"section\" or \"ring\" is required");
  if (has_section) return SectionAnchor{u32_field(j, "section", path)};
  return ring_from_json(j.at("ring"), path + "/ring", 0);
}

json to_json(const RegionFeedback& f) {
  return {{"frame", frame_ref_to_json(f.frame)},
          {"anchor", to_json(f.anchor)},
          {"text", f.text},
          {"style", std::string(style_name(f.style))}};
}

RegionFeedback feedback_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  RegionFeedback f;
  f.frame = frame_ref_from_json(field(j, "frame", path), path + "/frame");
  f.anchor = anchor_from_json(field(j, "anchor", path), path + "/anchor");
  f.text = string_field(j, "text", path);
  if (j.contains("style")) {
    const auto name = string_field(j, "style", path);
    const auto style = style_from_name(name);
    if (!style) throw ParseError(path + "/style", "unknown style \"" + name + "\"");
    f.style = *style;
  }
  return f;
}

namespace {

json to_json_variant(const Mcq& q) {
  json frames = json::array();
  for (const auto& f : q.stem_frames) frames.push_back(frame_ref_to_json(f));
  json options = json::array();
  for (const auto& o : q.options) {
    json fb = json::array();
    for (const auto& f : o.feedback) fb.push_back(to_json(f));
    json oj{{"text", o.text}, {"feedback", std::move(fb)}};
    if (o.image) oj["image"] = *o.image;
    options.push_back(std::move(oj));
  }
  return {{"type", "mcq"},
          {"stem", q.stem},
          {"stem_frames", std::move(frames)},
          {"stem_images", q.stem_images},
          {"options", std::move(options)},
          {"correct", q.correct}};
}

json to_json_variant(const ExtractComponent& q) {
  return {{"type", "extract"},
          {"frame", frame_ref_to_json(q.frame)},
          {"removed_section", q.removed_section},
          {"inpainted_asset", q.inpainted_asset},
          {"prompt", q.prompt},
          {"tool_choices", q.tool_choices},
          {"accepted_tools", q.accepted_tools},
          {"placement", ring_to_json(q.placement)}};
}

json to_json_variant(const DrawPath& q) {
  return {{"type", "path"},
          {"frame", frame_ref_to_json(q.frame)},
          {"target_section", q.target_section},
          {"prompt", q.prompt},
          {"author_path", points_to_json(q.author_path)},
          {"tolerance", q.tolerance}};
}

Mcq mcq_from_json(const json& j, const std::string& path) {
  Mcq q;
  q.stem = string_field(j, "stem", path);
  if (j.contains("stem_frames")) {
    const auto& fr = j.at("stem_frames");
    if (!fr.is_array()) throw ParseError(path + "/stem_frames", "expected an array");
    for (std::size_t i = 0; i < fr.size(); ++i) {
      q.stem_frames.push_back(frame_ref_from_json(fr[i], path + "/stem_frames/" + std::to_string(i)));
    }
  }
  q.stem_images = string_list(j, "stem_images", path);
  const auto& opts = field(j, "options", path);
  if (!opts.is_array()) throw ParseError(path + "/options", "expected an array");
  for (std::size_t i = 0; i < opts.size(); ++i) {
    const auto opath = path + "/options/" + std::to_string(i);
    const auto& oj = opts[i];
    if (!oj.is_object()) throw ParseError(opath, "expected an object");
    McqOption o;
    o.text = optional_string(oj, "text", opath);
    if (oj.contains("image") && !oj.at("image").is_null()) o.image = string_field(oj, "image", opath);
    if (oj.contains("feedback")) {
      const auto& fb = oj.at("feedback");
      if (!fb.is_array()) throw ParseError(opath + "/feedback", "expected an array");
      for (std::size_t k = 0; k < fb.size(); ++k) {
        o.feedback.push_back(feedback_from_json(fb[k], opath + "/feedback/" + std::to_string(k)));
      }
    }
    q.options.push_back(std::move(o));
  }
  q.correct = index_list(j, "correct", path);
  return q;
}

ExtractComponent extract_from_json(const json& j, const std::string& path) {
  ExtractComponent q;
  q.frame = frame_ref_from_json(field(j, "frame", path), path + "/frame");
  q.removed_section = u32_field(j, "removed_section", path);
  q.inpainted_asset = string_field(j, "inpainted_asset", path);
  q.prompt = string_field(j, "prompt", path);
  q.tool_choices = string_list(j, "tool_choices", path);
  q.accepted_tools = index_list(j, "accepted_tools", path);
  q.placement = ring_from_json(field(j, "placement", path), path + "/placement", 0);
  return q;
}

DrawPath path_from_json(const json& j, const std::string& path) {
  DrawPath q;
  q.frame = frame_ref_from_json(field(j, "frame", path), path + "/frame");
  q.target_section = u32_field(j, "target_section", path);
  q.prompt = string_field(j, "prompt", path);
  q.author_path = ring_from_json(field(j, "author_path", path), path + "/author_path", 0);
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    if (!t.is_number() || !std::isfinite(t.get<double>())) {
      throw ParseError(path + "/tolerance", "expected a number");
    }
    q.tolerance = t.get<double>();
  }
  return q;
}

}  // namespace

json frame_ref_to_json(const FrameRef& f) {
  return {{"video", f.video_id}, {"index", f.frame_index}, {"timestamp_ms", f.timestamp_ms}};
}

FrameRef frame_ref_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected a frame reference object");
  FrameRef f;
  f.video_id = string_field(j, "video", path);
  const auto& idx = field(j, "index", path);
  if (!idx.is_number_integer()) throw ParseError(path + "/index", "expected an integer");
  f.frame_index = idx.get<std::int64_t>();
  if (j.contains("timestamp_ms")) {
    const auto& ts = j.at("timestamp_ms");
    if (!ts.is_number_integer()) throw ParseError(path + "/timestamp_ms", "expected an integer");
    f.timestamp_ms = ts.get<std::int64_t>();
  }
  return f;
}

std::vector<std::string> default_feedback_starters() {
  return {"This region is the {class}; notice",     "Before dividing anything here, confirm",
          "The {class} is retracted so that",       "A safer plane of dissection would be",
          "Look for the landmark next to the {class}:", "This choice risks injury to"};
}

std::vector<std::string> feedback_starters_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "expected {\"starters\": [...]}");
  if (!j.contains("starters")) throw ParseError("/starters", "missing");
  return string_list(j, "starters", "");
}

json to_json(const Question& q) {
  return std::visit([](const auto& v) { return to_json_variant(v); }, q);
}

json to_json(const Quiz& quiz) {
  json questions = json::array();
  for (const auto& q : quiz.questions) questions.push_back(to_json(q));
  return {{"schema", kQuizSchema},
          {"id", quiz.id},
          {"title", quiz.title},
          {"author", quiz.author},
          {"created_at", quiz.created_at},
          {"modified_at", quiz.modified_at},
          {"videos", quiz.videos},
          {"questions", std::move(questions)}};
}

Question question_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected a question object");
  const auto type = string_field(j, "type", path);
  if (type == "mcq") return mcq_from_json(j, path);
  if (type == "extract") return extract_from_json(j, path);
  if (type == "path") return path_from_json(j, path);
  throw ParseError(path + "/type", "unknown question type \"" + type + "\"");
}

Quiz quiz_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "expected a quiz object");
  if (j.contains("schema") && j.at("schema") != kQuizSchema) {
    throw ParseError("/schema", std::string("expected \"") + kQuizSchema + "\"");
  }
  Quiz quiz;
  quiz.id = optional_string(j, "id", "");
  quiz.title = string_field(j, "title", "");
  quiz.author = optional_string(j, "author", "");
  quiz.created_at = optional_string(j, "created_at", "");
  quiz.modified_at = optional_string(j, "modified_at", "");
  quiz.videos = string_list(j, "videos", "");
  const auto& qs = field(j, "questions", "");
  if (!qs.is_array()) throw ParseError("/questions", "expected an array");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    quiz.questions.push_back(question_from_json(qs[i], "/questions/" + std::to_string(i)));
  }
  return quiz;
}

}  // namespace surgq
