#include <thread>

#include "httplib.h"
#include "surgq/fusion.hpp"
#include "surgq/highlight.hpp"
#include "surgq/inpaint.hpp"
#include "surgq/labeling.hpp"
#include "test_util.hpp"

namespace surgq {
namespace {

// 40x30 frame: Liver block in the middle of Background.
struct Frame {
  FusedScene scene = [] {
    std::vector<std::uint8_t> labels(40 * 30, 0);
    for (int y = 10; y < 20; ++y)
      for (int x = 10; x < 30; ++x) labels[y * 40 + x] = 2;
    const ClassMap cm(40, 30, labels);
    return fuse(cm, sections_from_components(cm));
  }();
  RgbImage image = [] {
    RgbImage img(40, 30);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x) img.set_pixel(x, y, {static_cast<std::uint8_t>(x * 6), static_cast<std::uint8_t>(y * 8), 90});
    return img;
  }();
  std::uint32_t liver_section() const {
    for (std::uint32_t s = 0; s < scene.sections.size(); ++s)
      if (scene.sections[s].cls == ClassId::liver) return s;
    return 0;
  }
};

std::vector<std::uint8_t> changed(const RgbImage& a, const RgbImage& b) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(a.width) * a.height);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) out[y * a.width + x] = a.pixel(x, y) != b.pixel(x, y);
  return out;
}

TEST(HighlightTest, FillTintsExactlyTheRegion) {
  Frame f;
  const RegionAnchor anchor = SectionAnchor{f.liver_section()};
  const auto mask = anchor_mask(anchor, f.scene);
  const auto h = render_highlight(f.image, f.scene, anchor, HighlightStyle::fill);
  EXPECT_EQ(h.footprint, mask);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const auto src = f.image.pixel(x, y);
      const auto want = mask[y * 40 + x] ? blend_fill(src, palette_color(ClassId::liver)) : src;
      EXPECT_EQ(h.image.pixel(x, y), want) << x << "," << y;
    }
  }
  EXPECT_EQ(blend_fill({100, 0, 255}, {200, 50, 0}), (Rgb{140, 20, 153}));
}

TEST(HighlightTest, OutlineTouchesOnlyInnerBand) {
  Frame f;
  const RegionAnchor anchor = SectionAnchor{f.liver_section()};
  const auto h = render_highlight(f.image, f.scene, anchor, HighlightStyle::outline);
  const auto diff = changed(f.image, h.image);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool in = x >= 10 && x < 30 && y >= 10 && y < 20;
      const bool band = in && (x < 12 || x >= 28 || y < 12 || y >= 18);
      EXPECT_EQ(h.footprint[y * 40 + x], band ? 1 : 0) << x << "," << y;
      if (!band) EXPECT_EQ(diff[y * 40 + x], 0) << x << "," << y;
    }
  }
}

TEST(HighlightTest, WholeFrameRingTintsEverything) {
  Frame f;
  const RegionAnchor anchor = Ring{{0, 0}, {40, 0}, {40, 30}, {0, 30}};
  const auto h = render_highlight(f.image, f.scene, anchor, HighlightStyle::fill);
  for (auto v : h.footprint) EXPECT_EQ(v, 1);
  EXPECT_EQ(anchor_class(anchor, f.scene), ClassId::background);
}

TEST(HighlightTest, ArrowStaysInsideItsFootprint) {
  Frame f;
  const auto h = render_highlight(f.image, f.scene, SectionAnchor{f.liver_section()}, HighlightStyle::arrow);
  const auto diff = changed(f.image, h.image);
  std::size_t painted = 0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i]) EXPECT_EQ(h.footprint[i], 1);
    painted += diff[i];
  }
  EXPECT_GT(painted, 0u);
}

TEST(HighlightTest, BadAnchors) {
  Frame f;
  EXPECT_ERRC(anchor_mask(SectionAnchor{42}, f.scene), Errc::dangling_section);
  EXPECT_ERRC(anchor_mask(Ring{{-10, -10}, {-5, -10}, {-5, -5}}, f.scene), Errc::empty_region);
}

TEST(InpaintTest, SinglePixelTakesSurroundingColour) {
  RgbImage img(5, 5, {30, 60, 90});
  img.set_pixel(2, 2, {255, 0, 0});
  std::vector<std::uint8_t> mask(25, 0);
  mask[12] = 1;
  DiffusionInpainter d;
  const auto out = inpaint(d, img, mask);
  EXPECT_EQ(out.pixel(2, 2), (Rgb{30, 60, 90}));
}

TEST(InpaintTest, UnmaskedPixelsUntouched) {
  Frame f;
  const auto mask = anchor_mask(SectionAnchor{f.liver_section()}, f.scene);
  DiffusionInpainter d;
  const auto out = inpaint(d, f.image, mask);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) {
      const int x = static_cast<int>(i % 40), y = static_cast<int>(i / 40);
      EXPECT_EQ(out.pixel(x, y), f.image.pixel(x, y));
    }
  }
  EXPECT_ERRC(inpaint(d, f.image, std::vector<std::uint8_t>(mask.size(), 0)), Errc::empty_region);
  EXPECT_ERRC(inpaint(d, f.image, std::vector<std::uint8_t>(3, 1)), Errc::dimension_mismatch);
}

TEST(InpaintTest, RemoteDownFallsBackWithWarning) {
  // Port 9 on localhost: nothing listens there in the sandbox.
  std::vector<std::string> warnings;
  auto backend = make_inpainter("http://127.0.0.1:9/inpaint", [&](const std::string& w) { warnings.push_back(w); });
  RgbImage img(6, 6, {10, 10, 10});
  std::vector<std::uint8_t> mask(36, 0);
  mask[14] = 1;
  const auto out = inpaint(*backend, img, mask);
  EXPECT_EQ(out.pixel(2, 2), (Rgb{10, 10, 10}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("diffusion"), std::string::npos);
  RemoteInpainter remote("http://127.0.0.1:9/inpaint", std::chrono::milliseconds(500));
  EXPECT_ERRC(remote.fill(img, mask), Errc::backend_unavailable);
}

TEST(InpaintTest, RemoteBackendRoundTrip) {
  httplib::Server fake;
  fake.Post("/inpaint", [](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("image") || !req.has_file("mask")) {
      res.status = 400;
      return;
    }
    auto img = decode_rgb_png(std::span(reinterpret_cast<const std::uint8_t*>(req.get_file_value("image").content.data()),
                                        req.get_file_value("image").content.size()));
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) img.set_pixel(x, y, {1, 2, 3});
    const auto png = encode_rgb_png(img);
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  });
  const int port = fake.bind_to_any_port("127.0.0.1");
  std::thread t([&] { fake.listen_after_bind(); });
  fake.wait_until_ready();

  RemoteInpainter remote("http://127.0.0.1:" + std::to_string(port) + "/inpaint");
  RgbImage img(4, 4, {200, 200, 200});
  std::vector<std::uint8_t> mask(16, 0);
  mask[5] = 1;
  const auto out = inpaint(remote, img, mask);
  EXPECT_EQ(out.pixel(1, 1), (Rgb{1, 2, 3}));
  EXPECT_EQ(out.pixel(0, 0), (Rgb{200, 200, 200}));
  fake.stop();
  t.join();
}

}  // namespace
}  // namespace surgq
