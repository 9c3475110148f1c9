#include "surgq/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "surgq/corpus.hpp"
#include "surgq/fusion.hpp"
#include "surgq/geometry.hpp"
#include "surgq/labeling.hpp"

namespace surgq {

namespace {

// Distributions are spelled out instead of using <random>'s adaptors, whose
// output is implementation-defined; the seed must pin every byte.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Blob {
  ClassId cls;
  bool rect = false;
  double cx = 0, cy = 0;
  double a = 0, b = 0;  // semi-axes, or half-length / half-thickness
  double angle = 0;
  double vx = 0, vy = 0, va = 0;
};

// Semi-axis ranges as fractions of (width, height).
struct Extent {
  double a_lo, a_hi, b_lo, b_hi;
};

Extent extent_of(ClassId c) {
  switch (c) {
    case ClassId::liver:
      return {0.18, 0.35, 0.18, 0.35};
    case ClassId::gallbladder:
      return {0.08, 0.16, 0.10, 0.20};
    case ClassId::fat:
      return {0.06, 0.14, 0.08, 0.18};
    case ClassId::gi_tract:
      return {0.08, 0.18, 0.10, 0.20};
    case ClassId::blood:
      return {0.04, 0.08, 0.06, 0.12};
    case ClassId::tool:
      return {0.20, 0.35, 0.025, 0.045};
    default:
      return {0.15, 0.30, 0.12, 0.25};
  }
}

// Classes without a paint rank go underneath everything else.
int paint_key(ClassId c) { return z_rank(c).value_or(-1); }

Blob random_blob(ClassId cls, int w, int h, std::mt19937_64& rng) {
  const auto e = extent_of(cls);
  Blob b{cls};
  b.a = uniform(rng, e.a_lo, e.a_hi) * w;
  b.b = uniform(rng, e.b_lo, e.b_hi) * h;
  if (cls == ClassId::tool) {
    // Instruments enter through the bottom or a side edge.
    b.rect = true;
    const int edge = uniform_int(rng, 0, 2);
    double ex, ey, inward;
    if (edge == 0) {
      ex = uniform(rng, 0.2, 0.8) * w;
      ey = h;
      inward = -std::numbers::pi / 2;
    } else if (edge == 1) {
      ex = 0;
      ey = uniform(rng, 0.4, 0.95) * h;
      inward = 0;
    } else {
      ex = w;
      ey = uniform(rng, 0.4, 0.95) * h;
      inward = std::numbers::pi;
    }
    b.angle = inward + uniform(rng, -0.5, 0.5);
    b.cx = ex + std::cos(b.angle) * b.a * 0.8;
    b.cy = ey + std::sin(b.angle) * b.a * 0.8;
    b.vx = uniform(rng, -4, 4);
    b.vy = uniform(rng, -4, 4);
    b.va = uniform(rng, -0.01, 0.01);
  } else {
    b.cx = uniform(rng, 0.1, 0.9) * w;
    b.cy = uniform(rng, 0.1, 0.9) * h;
    b.angle = uniform(rng, 0, std::numbers::pi);
    b.vx = uniform(rng, -2, 2);
    b.vy = uniform(rng, -2, 2);
    b.va = uniform(rng, -0.005, 0.005);
  }
  return b;
}

std::vector<Blob> random_layout(int w, int h, std::mt19937_64& rng, const SyntheticSpec& spec) {
  std::vector<Blob> blobs;
  for (auto cls : spec.classes) {
    int count = uniform_int(rng, spec.min_blobs_per_class, spec.max_blobs_per_class);
    // One liver and one gallbladder per view.
    if (cls == ClassId::liver || cls == ClassId::gallbladder) count = std::min(count, 1);
    for (int i = 0; i < count; ++i) blobs.push_back(random_blob(cls, w, h, rng));
  }
  std::stable_sort(blobs.begin(), blobs.end(),
                   [](const Blob& x, const Blob& y) { return paint_key(x.cls) < paint_key(y.cls); });
  return blobs;
}

std::vector<std::uint8_t> paint(const std::vector<Blob>& blobs, int w, int h, int step) {
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h, static_cast<std::uint8_t>(ClassId::background));
  for (const auto& b : blobs) {
    const double cx = b.cx + b.vx * step;
    const double cy = b.cy + b.vy * step;
    const double ang = b.angle + b.va * step;
    const double c = std::cos(ang);
    const double s = std::sin(ang);
    const double r = std::hypot(b.a, b.b);
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        const double u = (dx * c + dy * s) / b.a;
        const double v = (-dx * s + dy * c) / b.b;
        const bool inside = b.rect ? (std::abs(u) <= 1.0 && std::abs(v) <= 1.0) : (u * u + v * v <= 1.0);
        if (inside) labels[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint8_t>(b.cls);
      }
    }
  }
  return labels;
}

// Repaints the smallest undersized component with its most common
// neighbouring class until none is left.
void absorb_small_components(std::vector<std::uint8_t>& labels, int w, int h, double min_fraction) {
  const auto min_size = static_cast<std::uint32_t>(std::ceil(min_fraction * w * h));
  while (true) {
    const auto comps = label_regions(std::span<const std::uint8_t>(labels), w, h);
    std::uint32_t victim = kNoComponent;
    for (std::uint32_t c = 0; c < comps.count(); ++c) {
      if (comps.sizes[c] >= min_size || comps.count() == 1) continue;
      if (victim == kNoComponent || comps.sizes[c] < comps.sizes[victim]) victim = c;
    }
    if (victim == kNoComponent) return;

    std::array<std::uint64_t, kClassCount> tally{};
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto i = static_cast<std::size_t>(y) * w + x;
        if (comps.labels[i] != victim) continue;
        const std::array<std::array<int, 2>, 4> nb{{{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}}};
        for (const auto& [nx, ny] : nb) {
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto j = static_cast<std::size_t>(ny) * w + nx;
          if (comps.labels[j] != victim) ++tally[labels[j]];
        }
      }
    }
    const auto target = static_cast<std::uint8_t>(std::max_element(tally.begin(), tally.end()) - tally.begin());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (comps.labels[i] == victim) labels[i] = target;
    }
  }
}

void check_spec(const SyntheticSpec& spec) {
  auto bad = [](const std::string& why) { return Error(Errc::invalid_spec, "synthetic spec: " + why); };
  if (!(spec.noise >= 0.0 && spec.noise < 0.5)) throw bad("noise must be in [0, 0.5)");
  if (spec.frames < 1) throw bad("frames must be >= 1");
  if (spec.width < 2 || spec.height < 2) throw bad("canvas must be at least 2x2");
  if (spec.min_shot_length < 1 || spec.max_shot_length < spec.min_shot_length) throw bad("invalid shot lengths");
  if (spec.min_blobs_per_class < 0 || spec.max_blobs_per_class < spec.min_blobs_per_class) {
    throw bad("invalid blob counts");
  }
  if (!(spec.min_component_fraction >= 0.0 && spec.min_component_fraction < 1.0)) {
    throw bad("min_component_fraction must be in [0, 1)");
  }
  if (spec.frame_interval_ms < 1) throw bad("frame_interval_ms must be >= 1");
  if (!is_safe_id(spec.video_id)) throw bad("invalid video id");
}

}  // namespace

ClassMap random_scene(int width, int height, std::mt19937_64& rng, const SyntheticSpec& spec) {
  auto labels = paint(random_layout(width, height, rng, spec), width, height, 0);
  absorb_small_components(labels, width, height, spec.min_component_fraction);
  return ClassMap(width, height, std::move(labels));
}

ClassMap corrupt_minority(const ClassMap& truth, const SectionMask& sections, double noise, std::mt19937_64& rng) {
  if (truth.width() != sections.width() || truth.height() != sections.height()) {
    throw Error(Errc::dimension_mismatch, "truth map and sections differ in size");
  }
  if (!(noise >= 0.0 && noise < 0.5)) throw Error(Errc::invalid_spec, "noise must be in [0, 0.5)");
  std::vector<std::uint8_t> out(truth.labels().begin(), truth.labels().end());
  if (noise == 0.0) return ClassMap(truth.width(), truth.height(), std::move(out));

  // Bucket pixels by section, in row-major order within each bucket.
  const auto n_sec = sections.section_count();
  std::vector<std::uint32_t> start(n_sec + 1, 0);
  for (auto id : sections.ids()) ++start[id + 1];
  for (std::uint32_t s = 0; s < n_sec; ++s) start[s + 1] += start[s];
  std::vector<std::uint32_t> order(sections.size());
  {
    auto fill = start;
    for (std::uint32_t i = 0; i < sections.size(); ++i) order[fill[sections[i]]++] = i;
  }

  std::vector<std::uint32_t> picked;
  for (std::uint32_t s = 0; s < n_sec; ++s) {
    const auto n = start[s + 1] - start[s];
    const auto cap = (n - 1) / 2;
    picked.clear();
    for (auto k = start[s]; k < start[s + 1]; ++k) {
      if (uniform01(rng) < noise) picked.push_back(order[k]);
    }
    if (picked.size() > cap) {
      for (std::uint32_t i = 0; i < cap; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng() % (picked.size() - i));
        std::swap(picked[i], picked[j]);
      }
      picked.resize(cap);
    }
    for (auto p : picked) {
      const auto r = static_cast<std::uint8_t>(rng() % (kClassCount - 1));
      out[p] = r >= out[p] ? static_cast<std::uint8_t>(r + 1) : r;
    }
  }
  return ClassMap(truth.width(), truth.height(), std::move(out));
}

std::vector<float> histogram_features(const ClassMap& map) {
  const int w = map.width();
  const int h = map.height();
  const int half = w / 2;
  std::array<std::uint64_t, 2 * kClassCount> counts{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      counts[static_cast<std::size_t>(to_int(map.at(x, y))) * 2 + (x < half ? 0 : 1)]++;
    }
  }
  const double left = static_cast<double>(half) * h;
  const double right = static_cast<double>(w - half) * h;
  std::vector<float> out;
  out.reserve(kSyntheticFeatureDims);
  for (int c = 1; c < kClassCount; ++c) {
    out.push_back(static_cast<float>(left > 0 ? counts[c * 2] / left : 0.0));
    out.push_back(static_cast<float>(right > 0 ? counts[c * 2 + 1] / right : 0.0));
  }
  return out;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const int w = spec.width;
  const int h = spec.height;

  std::vector<SyntheticFrame> frames;
  frames.reserve(static_cast<std::size_t>(spec.frames));
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(spec.frames) * kSyntheticFeatureDims);
  std::vector<FrameRef> refs;
  std::vector<std::size_t> shot_starts;

  std::vector<Blob> layout;
  int shot_left = 0;
  int step = 0;
  for (int t = 0; t < spec.frames; ++t) {
    if (shot_left == 0) {
      shot_starts.push_back(static_cast<std::size_t>(t));
      shot_left = uniform_int(rng, spec.min_shot_length, spec.max_shot_length);
      layout = random_layout(w, h, rng, spec);
      step = 0;
    }
    auto labels = paint(layout, w, h, step);
    absorb_small_components(labels, w, h, spec.min_component_fraction);
    ClassMap truth(w, h, std::move(labels));
    auto sections = sections_from_components(truth);
    auto noisy = corrupt_minority(truth, sections, spec.noise, rng);

    auto feat = histogram_features(truth);
    for (auto& v : feat) v += static_cast<float>(spec.feature_sigma * normal(rng));
    values.insert(values.end(), feat.begin(), feat.end());

    FrameRef ref{spec.video_id, t, static_cast<std::int64_t>(t) * spec.frame_interval_ms};
    refs.push_back(ref);
    frames.push_back({std::move(ref), std::move(truth), std::move(sections), std::move(noisy)});
    --shot_left;
    ++step;
  }
  return SyntheticCorpus{spec, std::move(frames), FeatureSeries(kSyntheticFeatureDims, std::move(values), refs),
                         std::move(shot_starts)};
}

void write_synthetic_project(const SyntheticCorpus& corpus, const std::filesystem::path& root) {
  const auto& spec = corpus.spec;
  auto project = Project::init(root, "synthetic-" + std::to_string(spec.seed), spec.width, spec.height);
  project.add_video({spec.video_id, 1000.0 / static_cast<double>(spec.frame_interval_ms)});
  for (const auto& f : corpus.frames) {
    const auto scene = fuse(f.noisy, f.truth_sections);
    project.add_frame(f.frame, scene, render_class_map(f.truth), &f.truth, &f.noisy);
  }
  write_sfv(root / "features.sfv", corpus.features);
  project.manifest().features = "features.sfv";
  project.save();
}

}  // namespace surgq
