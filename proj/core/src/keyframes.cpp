#include "surgq/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace surgq {

namespace {

// Consecutive samples closer than this are one plateau. Window means over
// different pair counts can differ in the last ulp even when every pair has
// the same similarity.
constexpr double kPlateauTolerance = 1e-12;

}  // namespace

FeatureSeries::FeatureSeries(std::size_t dims, std::vector<float> values, std::vector<FrameRef> frames)
    : dims_(dims), values_(std::move(values)), frames_(std::move(frames)) {
  if (dims_ == 0) throw Error(Errc::invalid_argument, "feature dimension must be >= 1");
  if (values_.size() % dims_ != 0) {
    throw Error(Errc::dimension_mismatch, "feature buffer is not a whole number of rows");
  }
  const std::size_t t_count = values_.size() / dims_;
  if (t_count == 0) throw Error(Errc::empty_series, "no feature rows");
  if (frames_.empty()) {
    frames_.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
      frames_.push_back({"", static_cast<std::int64_t>(t), static_cast<std::int64_t>(t) * 1000});
    }
  } else if (frames_.size() != t_count) {
    throw Error(Errc::length_mismatch, std::to_string(frames_.size()) + " frame refs for " +
                                           std::to_string(t_count) + " feature rows");
  }
  for (std::size_t t = 0; t < t_count; ++t) {
    const auto r = row(t);
    if (std::all_of(r.begin(), r.end(), [](float v) { return v == 0.0f; })) {
      throw Error(Errc::zero_norm_feature, "feature row " + std::to_string(t) + " has zero norm");
    }
  }
}

SimilaritySignal banded_similarity_signal(const FeatureSeries& features, int half_width) {
  if (half_width < 1) throw Error(Errc::invalid_argument, "half width must be >= 1");
  const std::size_t n = features.size();
  const std::size_t d = features.dims();
  const std::size_t w = static_cast<std::size_t>(half_width);

  std::vector<double> unit(n * d);
  for (std::size_t t = 0; t < n; ++t) {
    const auto r = features.row(t);
    double norm = 0.0;
    for (float v : r) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k) unit[t * d + k] = r[k] / norm;
  }

  // band[o - 1][i] = cos(v_i, v_{i+o}) for offsets 1..2w.
  const std::size_t max_offset = std::min(2 * w, n > 0 ? n - 1 : 0);
  std::vector<std::vector<double>> band(max_offset);
  for (std::size_t o = 1; o <= max_offset; ++o) {
    auto& b = band[o - 1];
    b.resize(n - o);
    for (std::size_t i = 0; i + o < n; ++i) {
      const double* a = &unit[i * d];
      const double* c = &unit[(i + o) * d];
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += a[k] * c[k];
      b[i] = dot;
    }
  }

  SimilaritySignal out;
  out.half_width = half_width;
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= w ? t - w : 0;
    const std::size_t hi = std::min(n - 1, t + w);
    if (hi == lo) {
      out.values[t] = 1.0;
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i + 1; j <= hi; ++j) {
        sum += band[j - i - 1][i];
        ++pairs;
      }
    }
    out.values[t] = sum / static_cast<double>(pairs);
  }
  return out;
}

// A local maximum is a plateau (run of equal samples, possibly length 1)
// whose existing neighbours are all strictly lower; a plateau touching one
// end of the signal qualifies through its other neighbour. Its index is the
// plateau centre, rounded up. Prominence is the height above the higher of
// the two lowest points reached on each side before terrain strictly higher
// than the peak (or the signal end); a side with no samples is ignored.
std::vector<PeakCandidate> find_local_maxima(std::span<const double> s) {
  std::vector<PeakCandidate> out;
  const std::size_t n = s.size();
  std::size_t b = 0;
  while (b < n) {
    std::size_t e = b;
    while (e + 1 < n && std::abs(s[e + 1] - s[e]) <= kPlateauTolerance) ++e;
    const double v = s[b];
    const bool has_left = b > 0;
    const bool has_right = e + 1 < n;
    const bool left_lower = !has_left || s[b - 1] < v - kPlateauTolerance;
    const bool right_lower = !has_right || s[e + 1] < v - kPlateauTolerance;
    if ((has_left || has_right) && left_lower && right_lower) {
      std::optional<double> left_min;
      for (std::size_t i = b; i-- > 0;) {
        if (s[i] > v + kPlateauTolerance) break;
        left_min = left_min ? std::min(*left_min, s[i]) : s[i];
      }
      std::optional<double> right_min;
      for (std::size_t i = e + 1; i < n; ++i) {
        if (s[i] > v + kPlateauTolerance) break;
        right_min = right_min ? std::min(*right_min, s[i]) : s[i];
      }
      double reference = -std::numeric_limits<double>::infinity();
      if (left_min) reference = std::max(reference, *left_min);
      if (right_min) reference = std::max(reference, *right_min);
      out.push_back({(b + e + 1) / 2, b, e, v, v - reference});
    }
    b = e + 1;
  }
  return out;
}

std::vector<std::size_t> detect_peaks(const SimilaritySignal& signal, const PeakConfig& config) {
  if (config.min_separation < 1) throw Error(Errc::invalid_argument, "min_separation must be >= 1");
  if (config.min_prominence < 0) throw Error(Errc::invalid_argument, "min_prominence must be >= 0");
  const auto& s = signal.values;
  if (s.empty()) return {};

  auto candidates = find_local_maxima(s);
  std::erase_if(candidates, [&](const PeakCandidate& c) { return c.prominence < config.min_prominence; });
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PeakCandidate& a, const PeakCandidate& b) { return a.height > b.height; });

  std::vector<std::size_t> kept;
  const auto sep = static_cast<std::size_t>(config.min_separation);
  for (const auto& c : candidates) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return (k > c.index ? k - c.index : c.index - k) >= sep;
    });
    if (clear) kept.push_back(c.index);
  }

  if (kept.empty()) {
    const double top = *std::max_element(s.begin(), s.end());
    std::size_t b = 0;
    while (s[b] < top - kPlateauTolerance) ++b;
    std::size_t e = b;
    while (e + 1 < s.size() && std::abs(s[e + 1] - s[e]) <= kPlateauTolerance) ++e;
    kept.push_back((b + e + 1) / 2);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::size_t> keyframe_indices(const FeatureSeries& features, const KeyframeConfig& config) {
  const auto signal = banded_similarity_signal(features, config.half_width);
  return detect_peaks(signal, {config.min_separation, config.min_prominence});
}

std::vector<FrameRef> keyframes(const FeatureSeries& features, const KeyframeConfig& config) {
  std::vector<FrameRef> out;
  for (auto t : keyframe_indices(features, config)) out.push_back(features.frame(t));
  return out;
}

}  // namespace surgq
