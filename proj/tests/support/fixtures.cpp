#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unistd.h>

#include "oracles.hpp"
#include "surgq/corpus.hpp"

namespace surgq::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

SyntheticSpec small_spec(int frames, std::uint64_t seed, int width, int height) {
  SyntheticSpec spec;
  spec.frames = frames;
  spec.seed = seed;
  spec.width = width;
  spec.height = height;
  spec.min_shot_length = 3;
  spec.max_shot_length = 6;
  return spec;
}

SyntheticSpec write_small_project(const fs::path& root, int frames, std::uint64_t seed) {
  const auto spec = small_spec(frames, seed);
  write_synthetic_project(generate_synthetic(spec), root);
  auto project = Project::open(root);
  project.rebuild_index();
  project.save();
  return spec;
}

RandomPair random_pair(std::mt19937_64& rng, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_int_distribution<int> block(1, 6);
  std::uniform_int_distribution<int> n_classes(1, kClassCount);
  std::uniform_int_distribution<int> n_sections(1, 12);
  const int w = side(rng), h = side(rng);
  auto labels = oracle::random_labels(w, h, n_classes(rng), rng, block(rng));
  const auto raw = oracle::random_labels(w, h, n_sections(rng), rng, block(rng));
  // Sections are connected regions of the raw labels so some are fragmented
  // across the class boundaries and some are not.
  std::vector<std::uint32_t> ids(raw.begin(), raw.end());
  return {ClassMap(w, h, std::move(labels)), SectionMask::renumbered(w, h, ids)};
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "Which", " structure", " is", " the cystic duct", "?", " \"quoted\"", " back\\slash", " tab\t",
      " line\nbreak", " Calot's triangle", " élève", " →", " 80%", ""};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 6);
  std::string s;
  for (auto n = len(rng); n > 0; --n) s += pieces[pick(rng)];
  return s;
}

double random_coord(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-400.0, 1200.0);
  std::bernoulli_distribution integral(0.3);
  const double v = u(rng);
  return integral(rng) ? std::round(v) : v;
}

Ring random_ring(std::mt19937_64& rng, std::size_t min_points) {
  std::uniform_int_distribution<std::size_t> n(min_points, min_points + 8);
  Ring r;
  for (auto k = n(rng); k > 0; --k) r.push_back({random_coord(rng), random_coord(rng)});
  return r;
}

FrameRef random_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> idx(0, 100000);
  std::bernoulli_distribution second(0.3);
  const auto i = idx(rng);
  return {second(rng) ? "video-02" : "video01", i, i * 40};
}

RegionFeedback random_feedback(std::mt19937_64& rng) {
  std::bernoulli_distribution use_ring(0.4);
  std::uniform_int_distribution<std::uint32_t> sec(0, 40);
  std::uniform_int_distribution<int> style(0, 2);
  RegionFeedback f;
  f.frame = random_frame(rng);
  if (use_ring(rng)) {
    f.anchor = random_ring(rng, 3);
  } else {
    f.anchor = SectionAnchor{sec(rng)};
  }
  f.text = random_text(rng);
  f.style = static_cast<HighlightStyle>(style(rng));
  return f;
}

std::vector<std::size_t> random_indices(std::mt19937_64& rng, std::size_t bound) {
  std::vector<std::size_t> out;
  std::bernoulli_distribution take(0.4);
  for (std::size_t i = 0; i < bound; ++i) {
    if (take(rng)) out.push_back(i);
  }
  return out;
}

Question random_question(std::mt19937_64& rng, int variant) {
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_int_distribution<std::uint32_t> sec(0, 40);
  std::bernoulli_distribution coin(0.5);
  if (variant == 0) {
    Mcq q;
    q.stem = random_text(rng);
    for (int i = small(rng); i > 0; --i) q.stem_frames.push_back(random_frame(rng));
    for (int i = small(rng); i > 0; --i) q.stem_images.push_back("assets/stem-" + std::to_string(i) + ".png");
    std::uniform_int_distribution<int> n_opts(2, 6);
    for (int i = n_opts(rng); i > 0; --i) {
      McqOption o;
      o.text = random_text(rng);
      if (coin(rng)) o.image = "assets/option-" + std::to_string(i) + ".jpg";
      for (int k = small(rng) % 3; k > 0; --k) o.feedback.push_back(random_feedback(rng));
      q.options.push_back(std::move(o));
    }
    q.correct = random_indices(rng, q.options.size());
    return q;
  }
  if (variant == 1) {
    ExtractComponent q;
    q.frame = random_frame(rng);
    q.removed_section = sec(rng);
    q.inpainted_asset = "assets/inpaint/x-" + std::to_string(sec(rng)) + ".png";
    q.prompt = random_text(rng);
    for (int i = small(rng) + 1; i > 0; --i) q.tool_choices.push_back("assets/tools/t" + std::to_string(i) + ".png");
    q.accepted_tools = random_indices(rng, q.tool_choices.size());
    q.placement = random_ring(rng, 3);
    return q;
  }
  DrawPath q;
  q.frame = random_frame(rng);
  q.target_section = sec(rng);
  q.prompt = random_text(rng);
  q.author_path = random_ring(rng, 2);
  std::uniform_real_distribution<double> tol(1.0, 80.0);
  q.tolerance = coin(rng) ? kDefaultPathTolerance : tol(rng);
  return q;
}

}  // namespace

Quiz random_quiz(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_questions(3, 8), variant(0, 2), id(0, 99999);
  Quiz quiz;
  quiz.id = "quiz-" + std::to_string(id(rng));
  quiz.title = random_text(rng);
  quiz.author = random_text(rng);
  quiz.created_at = "2026-10-16T09:30:00Z";
  quiz.modified_at = "2026-10-16T10:00:00Z";
  quiz.videos = {"video01"};
  // Every quiz carries each variant at least once.
  for (int v = 0; v < 3; ++v) quiz.questions.push_back(random_question(rng, v));
  for (int i = n_questions(rng) - 3; i > 0; --i) quiz.questions.push_back(random_question(rng, variant(rng)));
  std::shuffle(quiz.questions.begin(), quiz.questions.end(), rng);
  return quiz;
}

}  // namespace surgq::testing
