#pragma once

// Authored questions and their grading. Three variants: multiple choice with
// region-anchored feedback, extract-a-component (pick the removed tool and
// where it goes), and draw-a-path over a target component.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "surgq/error.hpp"
#include "surgq/geometry.hpp"
#include "surgq/scene.hpp"

namespace surgq {

enum class HighlightStyle { fill, outline, arrow };

std::string_view style_name(HighlightStyle s);
std::optional<HighlightStyle> style_from_name(std::string_view name);

struct SectionAnchor {
  std::uint32_t section = 0;
  bool operator==(const SectionAnchor&) const = default;
};
using RegionAnchor = std::variant<SectionAnchor, Ring>;

struct RegionFeedback {
  FrameRef frame;
  RegionAnchor anchor;
  std::string text;
  HighlightStyle style = HighlightStyle::fill;
  bool operator==(const RegionFeedback&) const = default;
};

struct McqOption {
  std::string text;
  std::optional<std::string> image;  // asset path relative to the project
  std::vector<RegionFeedback> feedback;
  bool operator==(const McqOption&) const = default;
};

struct Mcq {
  std::string stem;
  std::vector<FrameRef> stem_frames;
  std::vector<std::string> stem_images;
  std::vector<McqOption> options;
  std::vector<std::size_t> correct;  // ascending, no duplicates
  bool operator==(const Mcq&) const = default;
};

struct ExtractComponent {
  FrameRef frame;
  std::uint32_t removed_section = 0;
  std::string inpainted_asset;
  std::string prompt;
  /// Tool images offered to the learner; the first entries usually hold the
  /// right answer, the rest are distractors from the asset bank.
  std::vector<std::string> tool_choices;
  std::vector<std::size_t> accepted_tools;  // indices into tool_choices, ascending
  Ring placement;
  bool operator==(const ExtractComponent&) const = default;
};

inline constexpr double kDefaultPathTolerance = 30.0;

struct DrawPath {
  FrameRef frame;
  std::uint32_t target_section = 0;
  std::string prompt;
  std::vector<Point> author_path;
  double tolerance = kDefaultPathTolerance;
  bool operator==(const DrawPath&) const = default;
};

using Question = std::variant<Mcq, ExtractComponent, DrawPath>;

struct Quiz {
  std::string id;
  std::string title;
  std::string author;
  std::string created_at;   // ISO-8601 UTC
  std::string modified_at;  // ISO-8601 UTC
  std::vector<std::string> videos;
  std::vector<Question> questions;
  bool operator==(const Quiz&) const = default;
};

/// Lookups a question is validated against; the corpus supplies these for a
/// loaded project.
struct QuestionContext {
  /// Fused scene of a frame, or nullptr when the frame is unknown.
  std::function<const FusedScene*(const FrameRef&)> scene;
  std::function<bool(const std::string&)> asset_exists;
};

struct ValidationIssue {
  Errc code;
  std::string path;  // JSON pointer into the serialized question/quiz
  std::string message;
  bool operator==(const ValidationIssue&) const = default;
};

std::vector<ValidationIssue> validate_question(const Question& q, const QuestionContext& ctx,
                                               const std::string& base = "");
std::vector<ValidationIssue> validate_quiz(const Quiz& quiz, const QuestionContext& ctx);

/// Thrown by require_valid; the code is that of the first issue.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

void require_valid(const Quiz& quiz, const QuestionContext& ctx);

struct McqGrade {
  bool correct = false;
  std::vector<RegionFeedback> feedback;  // of each chosen option, ascending index
};

/// Throws UnknownOption for an out-of-range choice. Duplicates are ignored.
McqGrade grade_mcq(const Mcq& q, std::span<const std::size_t> chosen);

struct PathGrade {
  double distance = 0.0;
  double score = 0.0;
  bool pass = false;
};

inline constexpr std::size_t kPathSamples = 32;

/// Arc-length resampling to `n` points including both endpoints.
std::vector<Point> resample_path(std::span<const Point> path, std::size_t n = kPathSamples);

/// Discrete Frechet distance between two polylines.
double discrete_frechet(std::span<const Point> a, std::span<const Point> b);

/// Orientation-agnostic distance between resampled paths; symmetric in its
/// arguments. Throws PathTooShort for fewer than 2 points.
double path_distance(std::span<const Point> a, std::span<const Point> b);

PathGrade grade_path(const DrawPath& q, std::span<const Point> student);

struct ExtractGrade {
  bool tool_correct = false;
  bool placement_correct = false;
  bool correct = false;
};

/// Placement counts when the point falls inside the answer-key ring.
ExtractGrade grade_extract(const ExtractComponent& q, std::size_t chosen_tool, Point placed);

bool point_in_ring(const Ring& ring, Point p);

// JSON ("schema": "surgquiz/1"). Parsers throw ParseError with a JSON pointer.
inline constexpr const char* kQuizSchema = "surgquiz/1";

nlohmann::json frame_ref_to_json(const FrameRef& f);
FrameRef frame_ref_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json to_json(const RegionAnchor& anchor);
RegionAnchor anchor_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const RegionFeedback& feedback);
RegionFeedback feedback_from_json(const nlohmann::json& j, const std::string& path);

/// Editable openers offered when writing region feedback. "{class}" stands
/// for the anchored component's class name. A project may override the
/// defaults with feedback_starters.json ({"starters": [...]}).
std::vector<std::string> default_feedback_starters();
std::vector<std::string> feedback_starters_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Question& q);
nlohmann::json to_json(const Quiz& quiz);
Question question_from_json(const nlohmann::json& j, const std::string& path = "");
Quiz quiz_from_json(const nlohmann::json& j);

}  // namespace surgq
