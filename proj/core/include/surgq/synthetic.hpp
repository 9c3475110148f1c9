#pragma once

// Seeded synthetic corpora with known ground truth: blob scenes grouped in
// shots, a minority-noise corruption of each truth map, and histogram
// features whose block structure follows the shots.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "surgq/keyframes.hpp"
#include "surgq/scene.hpp"

namespace surgq {

struct SyntheticSpec {
  int frames = 200;
  int width = 854;
  int height = 480;
  double noise = 0.3;  // per-pixel flip probability, must be < 0.5
  std::uint64_t seed = 42;
  std::string video_id = "synth";
  std::int64_t frame_interval_ms = 1000;
  int min_shot_length = 10;
  int max_shot_length = 30;
  /// Classes that may appear as blobs. Abdominal Wall and Connected Tissue
  /// have no editable polygon and are left out by default.
  std::vector<ClassId> classes = {ClassId::liver, ClassId::gallbladder, ClassId::fat,
                                  ClassId::gi_tract, ClassId::blood, ClassId::tool};
  int min_blobs_per_class = 0;
  int max_blobs_per_class = 2;
  /// Components smaller than this share of the frame are absorbed by a neighbour.
  double min_component_fraction = 0.01;
  double feature_sigma = 0.01;
};

struct SyntheticFrame {
  FrameRef frame;
  ClassMap truth;
  SectionMask truth_sections;
  ClassMap noisy;
};

struct SyntheticCorpus {
  SyntheticSpec spec;
  std::vector<SyntheticFrame> frames;
  FeatureSeries features;
  std::vector<std::size_t> shot_starts;
};

inline constexpr std::size_t kSyntheticFeatureDims = 16;

/// Throws InvalidSpec for noise outside [0, 0.5) or non-positive sizes.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// One static scene from `rng`, after small-component absorption.
ClassMap random_scene(int width, int height, std::mt19937_64& rng, const SyntheticSpec& spec);

/// Flips each pixel of each section to a uniformly random other class with
/// probability `noise`, capped so flips stay a strict minority per section.
ClassMap corrupt_minority(const ClassMap& truth, const SectionMask& sections, double noise, std::mt19937_64& rng);

/// Per-class pixel fractions of the left and right halves (classes 1-8).
std::vector<float> histogram_features(const ClassMap& map);

/// Writes a project: fused(noisy, truth sections) as the class maps, truth
/// and noisy maps alongside, rendered truth as the frame image, and
/// features.sfv. `root` must not already hold a project.
void write_synthetic_project(const SyntheticCorpus& corpus, const std::filesystem::path& root);

}  // namespace surgq
