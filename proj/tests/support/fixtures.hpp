#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "surgq/quiz.hpp"
#include "surgq/synthetic.hpp"

namespace surgq::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "surgq");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Small canvas synthetic spec; keeps unit tests fast.
SyntheticSpec small_spec(int frames, std::uint64_t seed = 42, int width = 160, int height = 90);

/// Writes a small synthetic project (with index built) and returns its spec.
SyntheticSpec write_small_project(const std::filesystem::path& root, int frames, std::uint64_t seed = 42);

/// Random class map and an independent random section partition of it.
struct RandomPair {
  ClassMap class_map;
  SectionMask section_mask;
};
RandomPair random_pair(std::mt19937_64& rng, int max_side = 24);

/// Structurally arbitrary quiz covering every question variant; it is not
/// valid against any project.
Quiz random_quiz(std::mt19937_64& rng);

}  // namespace surgq::testing
