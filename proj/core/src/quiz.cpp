#include "surgq/quiz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace surgq {

namespace {

constexpr std::size_t kMinOptions = 2;
constexpr std::size_t kMaxOptions = 6;

class IssueSink {
 public:
  IssueSink(const QuestionContext& ctx, std::vector<ValidationIssue>& out) : ctx_(ctx), out_(out) {}

  void add(Errc code, std::string path, std::string message) {
    out_.push_back({code, std::move(path), std::move(message)});
  }

  const FusedScene* frame(const FrameRef& f, const std::string& path) {
    const FusedScene* scene = ctx_.scene ? ctx_.scene(f) : nullptr;
    if (!scene) add(Errc::dangling_frame_ref, path, "unknown frame " + f.key());
    return scene;
  }

  void section(const FusedScene* scene, std::uint32_t id, const std::string& path) {
    if (scene && id >= scene->sections.size()) {
      add(Errc::dangling_section, path,
          "section " + std::to_string(id) + " not in a frame with " + std::to_string(scene->sections.size()) +
              " sections");
    }
  }

  void asset(const std::string& rel, const std::string& path) {
    if (rel.empty()) {
      add(Errc::missing_asset, path, "empty asset path");
    } else if (ctx_.asset_exists && !ctx_.asset_exists(rel)) {
      add(Errc::missing_asset, path, "asset not found: " + rel);
    }
  }

  void text(const std::string& s, const std::string& path) {
    if (s.empty()) add(Errc::invalid_argument, path, "must not be empty");
  }

  void index_set(const std::vector<std::size_t>& set, std::size_t bound, const std::string& path) {
    if (set.empty()) {
      add(Errc::empty_correct_set, path, "no correct answer");
      return;
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i] >= bound) {
        add(Errc::unknown_option, path + "/" + std::to_string(i), "index " + std::to_string(set[i]) + " out of range");
      } else if (i > 0 && set[i] <= set[i - 1]) {
        add(Errc::invalid_argument, path + "/" + std::to_string(i), "indices must be ascending and unique");
      }
    }
  }

  void inside_canvas(std::span<const Point> pts, const FusedScene* scene, const std::string& path) {
    if (!scene) return;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      if (!(p.x >= 0 && p.y >= 0 && p.x <= scene->class_map.width() && p.y <= scene->class_map.height())) {
        add(Errc::invalid_argument, path + "/" + std::to_string(i), "point outside the canvas");
      }
    }
  }

  void feedback(const RegionFeedback& fb, const std::string& path) {
    text(fb.text, path + "/text");
    const auto* scene = frame(fb.frame, path + "/frame");
    if (const auto* s = std::get_if<SectionAnchor>(&fb.anchor)) {
      section(scene, s->section, path + "/anchor/section");
      return;
    }
    const auto& ring = std::get<Ring>(fb.anchor);
    if (ring.size() < 3) {
      add(Errc::empty_region, path + "/anchor/ring", "ring needs at least 3 points");
      return;
    }
    if (!scene) return;
    const auto mask = rasterize_ring(ring, scene->class_map.width(), scene->class_map.height());
    if (std::find(mask.begin(), mask.end(), 1) == mask.end()) {
      add(Errc::empty_region, path + "/anchor/ring", "ring covers no pixel");
    }
  }

 private:
  const QuestionContext& ctx_;
  std::vector<ValidationIssue>& out_;
};

void check(const Mcq& q, IssueSink& sink, const std::string& base) {
  sink.text(q.stem, base + "/stem");
  for (std::size_t i = 0; i < q.stem_frames.size(); ++i) {
    sink.frame(q.stem_frames[i], base + "/stem_frames/" + std::to_string(i));
  }
  for (std::size_t i = 0; i < q.stem_images.size(); ++i) {
    sink.asset(q.stem_images[i], base + "/stem_images/" + std::to_string(i));
  }
  if (q.options.size() < kMinOptions || q.options.size() > kMaxOptions) {
    sink.add(Errc::invalid_argument, base + "/options",
             "expected 2 to 6 options, got " + std::to_string(q.options.size()));
  }
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    const auto& opt = q.options[i];
    const auto opath = base + "/options/" + std::to_string(i);
    if (opt.text.empty() && !opt.image) sink.add(Errc::invalid_argument, opath, "option needs text or an image");
    if (opt.image) sink.asset(*opt.image, opath + "/image");
    for (std::size_t k = 0; k < opt.feedback.size(); ++k) {
      sink.feedback(opt.feedback[k], opath + "/feedback/" + std::to_string(k));
    }
  }
  sink.index_set(q.correct, q.options.size(), base + "/correct");
}

void check(const ExtractComponent& q, IssueSink& sink, const std::string& base) {
  const auto* scene = sink.frame(q.frame, base + "/frame");
  sink.section(scene, q.removed_section, base + "/removed_section");
  sink.asset(q.inpainted_asset, base + "/inpainted_asset");
  sink.text(q.prompt, base + "/prompt");
  if (q.tool_choices.empty()) sink.add(Errc::invalid_argument, base + "/tool_choices", "no tool choices");
  for (std::size_t i = 0; i < q.tool_choices.size(); ++i) {
    sink.asset(q.tool_choices[i], base + "/tool_choices/" + std::to_string(i));
  }
  sink.index_set(q.accepted_tools, q.tool_choices.size(), base + "/accepted_tools");
  if (q.placement.size() < 3) {
    sink.add(Errc::empty_region, base + "/placement", "placement ring needs at least 3 points");
  } else {
    sink.inside_canvas(q.placement, scene, base + "/placement");
  }
}

void check(const DrawPath& q, IssueSink& sink, const std::string& base) {
  const auto* scene = sink.frame(q.frame, base + "/frame");
  sink.section(scene, q.target_section, base + "/target_section");
  sink.text(q.prompt, base + "/prompt");
  if (q.author_path.size() < 2) {
    sink.add(Errc::path_too_short, base + "/author_path",
             "path needs at least 2 points, got " + std::to_string(q.author_path.size()));
  }
  sink.inside_canvas(q.author_path, scene, base + "/author_path");
  if (!(q.tolerance > 0) || !std::isfinite(q.tolerance)) {
    sink.add(Errc::invalid_argument, base + "/tolerance", "tolerance must be positive");
  }
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string first_message(const std::vector<ValidationIssue>& issues) {
  if (issues.empty()) return "validation failed";
  const auto& i = issues.front();
  auto msg = i.path + ": " + i.message;
  if (issues.size() > 1) msg += " (+" + std::to_string(issues.size() - 1) + " more)";
  return msg;
}

}  // namespace

std::string_view style_name(HighlightStyle s) {
  switch (s) {
    case HighlightStyle::fill:
      return "fill";
    case HighlightStyle::outline:
      return "outline";
    case HighlightStyle::arrow:
      return "arrow";
  }
  return "fill";
}

std::optional<HighlightStyle> style_from_name(std::string_view name) {
  if (name == "fill") return HighlightStyle::fill;
  if (name == "outline") return HighlightStyle::outline;
  if (name == "arrow") return HighlightStyle::arrow;
  return std::nullopt;
}

std::vector<ValidationIssue> validate_question(const Question& q, const QuestionContext& ctx,
                                               const std::string& base) {
  std::vector<ValidationIssue> issues;
  IssueSink sink(ctx, issues);
  std::visit([&](const auto& v) { check(v, sink, base); }, q);
  return issues;
}

std::vector<ValidationIssue> validate_quiz(const Quiz& quiz, const QuestionContext& ctx) {
  std::vector<ValidationIssue> issues;
  IssueSink sink(ctx, issues);
  sink.text(quiz.id, "/id");
  sink.text(quiz.title, "/title");
  if (quiz.questions.empty()) sink.add(Errc::invalid_argument, "/questions", "quiz needs at least one question");
  for (std::size_t i = 0; i < quiz.questions.size(); ++i) {
    auto more = validate_question(quiz.questions[i], ctx, "/questions/" + std::to_string(i));
    issues.insert(issues.end(), more.begin(), more.end());
  }
  return issues;
}

ValidationFailed::ValidationFailed(std::vector<ValidationIssue> issues)
    : Error(issues.empty() ? Errc::validation_failed : issues.front().code, first_message(issues)),
      issues_(std::move(issues)) {}

void require_valid(const Quiz& quiz, const QuestionContext& ctx) {
  auto issues = validate_quiz(quiz, ctx);
  if (!issues.empty()) throw ValidationFailed(std::move(issues));
}

McqGrade grade_mcq(const Mcq& q, std::span<const std::size_t> chosen) {
  std::vector<std::size_t> picked(chosen.begin(), chosen.end());
  for (auto c : picked) {
    if (c >= q.options.size()) {
      throw Error(Errc::unknown_option,
                  "option " + std::to_string(c) + " of " + std::to_string(q.options.size()) + " does not exist");
    }
  }
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());

  std::vector<std::size_t> key = q.correct;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());

  McqGrade grade;
  grade.correct = picked == key;
  for (auto c : picked) {
    const auto& fb = q.options[c].feedback;
    grade.feedback.insert(grade.feedback.end(), fb.begin(), fb.end());
  }
  return grade;
}

std::vector<Point> resample_path(std::span<const Point> path, std::size_t n) {
  if (path.size() < 2) {
    throw Error(Errc::path_too_short, "path needs at least 2 points, got " + std::to_string(path.size()));
  }
  if (n < 2) throw Error(Errc::invalid_argument, "resample count must be >= 2");

  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + dist(path[i - 1], path[i]);
  const double total = cum.back();

  std::vector<Point> out;
  out.reserve(n);
  if (total == 0.0) {
    out.assign(n, path.front());
    return out;
  }
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n - 1) {
      out.push_back(path.back());
      break;
    }
    const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < path.size() && cum[seg + 1] <= s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0 ? (s - cum[seg]) / len : 0.0;
    const auto& a = path[seg];
    const auto& b = path[seg + 1];
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
  return out;
}

double discrete_frechet(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw Error(Errc::path_too_short, "empty path");
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist(a[i], b[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else if (i == 0) {
        reach = std::max(cur[j - 1], d);
      } else if (j == 0) {
        reach = std::max(prev[0], d);
      } else {
        reach = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
      cur[j] = reach;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double path_distance(std::span<const Point> a, std::span<const Point> b) {
  const auto ra = resample_path(a);
  const auto rb = resample_path(b);
  std::vector<Point> rb_rev(rb.rbegin(), rb.rend());
  return std::min(discrete_frechet(ra, rb), discrete_frechet(ra, rb_rev));
}

PathGrade grade_path(const DrawPath& q, std::span<const Point> student) {
  if (!(q.tolerance > 0)) throw Error(Errc::invalid_argument, "tolerance must be positive");
  PathGrade g;
  g.distance = path_distance(q.author_path, student);
  // Relative slack absorbs rounding in resampling so a rigid shift by exactly
  // the tolerance still passes.
  g.pass = g.distance <= q.tolerance * (1.0 + 1e-9);
  g.score = std::max(0.0, 1.0 - g.distance / (2.0 * q.tolerance));
  return g;
}

bool point_in_ring(const Ring& ring, Point p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

ExtractGrade grade_extract(const ExtractComponent& q, std::size_t chosen_tool, Point placed) {
  if (chosen_tool >= q.tool_choices.size()) {
    throw Error(Errc::unknown_option, "tool choice " + std::to_string(chosen_tool) + " does not exist");
  }
  ExtractGrade g;
  g.tool_correct = std::find(q.accepted_tools.begin(), q.accepted_tools.end(), chosen_tool) != q.accepted_tools.end();
  g.placement_correct = point_in_ring(q.placement, placed);
  g.correct = g.tool_correct && g.placement_correct;
  return g;
}

}  // namespace surgq
