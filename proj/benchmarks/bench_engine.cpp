#include <random>

#include <benchmark/benchmark.h>

#include "surgq/fusion.hpp"
#include "surgq/geometry.hpp"
#include "surgq/keyframes.hpp"
#include "surgq/labeling.hpp"
#include "surgq/search.hpp"
#include "surgq/synthetic.hpp"

namespace {

using namespace surgq;

struct FrameFixture {
  ClassMap truth;
  SectionMask sections;
  ClassMap noisy;
};

const FrameFixture& frame_fixture() {
  static const FrameFixture f = [] {
    SyntheticSpec spec;
    spec.frames = 1;
    const auto corpus = generate_synthetic(spec);
    const auto& fr = corpus.frames.front();
    return FrameFixture{fr.truth, fr.truth_sections, fr.noisy};
  }();
  return f;
}

void BM_Fuse(benchmark::State& state) {
  const auto& f = frame_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fuse(f.noisy, f.sections));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.noisy.size()));
}
BENCHMARK(BM_Fuse)->Unit(benchmark::kMillisecond);

void BM_ExtractPolygons(benchmark::State& state) {
  const auto& f = frame_fixture();
  const auto scene = fuse(f.truth, f.sections);
  for (auto _ : state) benchmark::DoNotOptimize(extract_polygons(scene));
}
BENCHMARK(BM_ExtractPolygons)->Unit(benchmark::kMillisecond);

void BM_Rasterize(benchmark::State& state) {
  const auto& f = frame_fixture();
  const auto polys = extract_polygons(fuse(f.truth, f.sections));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(polys));
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);

// Feature rows as produced at 1 frame/s; D matches a VGG FC layer.
void BM_BandedSignal(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t d = 4096;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(0.1f, 1.0f);
  std::vector<float> values(t * d);
  for (auto& v : values) v = u(rng);
  const FeatureSeries series(d, std::move(values));
  for (auto _ : state) benchmark::DoNotOptimize(banded_similarity_signal(series, 15));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t));
}
BENCHMARK(BM_BandedSignal)->Arg(300)->Arg(1800)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> cls(0, kClassCount - 1);
  const auto grid = kDefaultIndexGrid;
  const auto cells = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<FrameIndex::Entry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> c(cells);
    for (auto& v : c) v = static_cast<std::uint8_t>(cls(rng));
    entries.push_back({{"v", static_cast<std::int64_t>(i), static_cast<std::int64_t>(i) * 1000}, std::move(c)});
  }
  const FrameIndex index(grid, std::move(entries));
  std::vector<std::uint8_t> q(cells);
  for (auto& v : q) v = static_cast<std::uint8_t>(cls(rng));
  const ClassMap ref(grid.width, grid.height, std::move(q));
  for (auto _ : state) benchmark::DoNotOptimize(search(index, ref));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Search)->Arg(1000)->Arg(45000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
