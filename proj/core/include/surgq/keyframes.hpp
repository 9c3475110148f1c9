#pragma once

// Keyframe identification from per-frame feature vectors. Frames inside a
// visually consistent stretch are mutually similar, so the mean pairwise
// cosine similarity over a sliding window peaks at the centre of each stretch.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "surgq/scene.hpp"

namespace surgq {

class FeatureSeries {
 public:
  /// `values` is T rows of `dims` floats. If `frames` is empty, frames are
  /// synthesized as video "" sampled at 1 frame/second.
  /// Throws EmptySeries for T = 0 and ZeroNormFeature for an all-zero row.
  FeatureSeries(std::size_t dims, std::vector<float> values, std::vector<FrameRef> frames = {});

  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t dims() const noexcept { return dims_; }
  std::span<const float> row(std::size_t t) const noexcept {
    return {values_.data() + t * dims_, dims_};
  }
  std::span<const float> values() const noexcept { return values_; }
  const FrameRef& frame(std::size_t t) const noexcept { return frames_[t]; }
  const std::vector<FrameRef>& frames() const noexcept { return frames_; }

 private:
  std::size_t dims_;
  std::vector<float> values_;
  std::vector<FrameRef> frames_;
};

struct SimilaritySignal {
  std::vector<double> values;
  int half_width = 0;
};

/// value[t] = mean cosine(v_i, v_j) over i < j inside the truncated window
/// [t - w, t + w]; a window holding one frame yields 1.0. Only the diagonal
/// band is evaluated.
SimilaritySignal banded_similarity_signal(const FeatureSeries& features, int half_width);

struct PeakConfig {
  int min_separation = 10;
  double min_prominence = 0.01;
};

/// Ascending indices of qualifying local maxima (see keyframes.cpp for the
/// prominence and plateau rules). Falls back to the first global maximum if
/// nothing qualifies.
std::vector<std::size_t> detect_peaks(const SimilaritySignal& signal, const PeakConfig& config);

/// Topographic prominence of every local maximum, keyed by its reported index.
struct PeakCandidate {
  std::size_t index;
  std::size_t plateau_begin;
  std::size_t plateau_end;  // inclusive
  double height;
  double prominence;
};
std::vector<PeakCandidate> find_local_maxima(std::span<const double> signal);

struct KeyframeConfig {
  int half_width = 15;
  int min_separation = 10;
  double min_prominence = 0.01;
};

std::vector<std::size_t> keyframe_indices(const FeatureSeries& features, const KeyframeConfig& config = {});
std::vector<FrameRef> keyframes(const FeatureSeries& features, const KeyframeConfig& config = {});

// Feature file: "SFV1", u32 T, u32 D (little-endian), then T*D little-endian f32.
std::vector<std::uint8_t> encode_sfv(const FeatureSeries& features);
FeatureSeries decode_sfv(std::span<const std::uint8_t> bytes, std::vector<FrameRef> frames = {});
FeatureSeries read_sfv(const std::filesystem::path& path, std::vector<FrameRef> frames = {});
void write_sfv(const std::filesystem::path& path, const FeatureSeries& features);

}  // namespace surgq
