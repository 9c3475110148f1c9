#include "surgq/inpaint.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "httplib.h"

namespace surgq {

namespace {

void check_mask(const RgbImage& image, std::span<const std::uint8_t> mask) {
  if (mask.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw Error(Errc::dimension_mismatch, "mask does not match the image");
  }
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; })) {
    throw Error(Errc::empty_region, "inpaint mask is empty");
  }
}

Error unavailable(const std::string& why) { return Error(Errc::backend_unavailable, "inpaint backend: " + why); }

}  // namespace

RgbImage DiffusionInpainter::fill(const RgbImage& image, std::span<const std::uint8_t> mask) {
  const int w = image.width;
  const int h = image.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> buf(n * 3);
  for (std::size_t i = 0; i < n * 3; ++i) buf[i] = image.data[i];

  auto masked = [&](int x, int y) { return mask[static_cast<std::size_t>(y) * w + x] != 0; };
  constexpr std::array<std::array<int, 2>, 4> kNeighbours{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

  std::array<double, 3> sum{};
  std::size_t border = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (masked(x, y)) continue;
      const bool touches = std::any_of(kNeighbours.begin(), kNeighbours.end(), [&](const auto& d) {
        const int nx = x + d[0];
        const int ny = y + d[1];
        return nx >= 0 && ny >= 0 && nx < w && ny < h && masked(nx, ny);
      });
      if (!touches) continue;
      const auto i = (static_cast<std::size_t>(y) * w + x) * 3;
      for (int c = 0; c < 3; ++c) sum[c] += buf[i + c];
      ++border;
    }
  }
  // A fully masked frame has no border to borrow from; mid-grey is as good as any.
  std::array<double, 3> init{128.0, 128.0, 128.0};
  if (border) {
    for (int c = 0; c < 3; ++c) init[c] = sum[c] / static_cast<double>(border);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    for (int c = 0; c < 3; ++c) buf[i * 3 + c] = init[c];
  }

  for (int sweep = 0; sweep < sweeps_; ++sweep) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!masked(x, y)) continue;
        std::array<double, 3> acc{};
        int k = 0;
        for (const auto& d : kNeighbours) {
          const int nx = x + d[0];
          const int ny = y + d[1];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto j = (static_cast<std::size_t>(ny) * w + nx) * 3;
          for (int c = 0; c < 3; ++c) acc[c] += buf[j + c];
          ++k;
        }
        if (k == 0) continue;
        const auto i = (static_cast<std::size_t>(y) * w + x) * 3;
        for (int c = 0; c < 3; ++c) buf[i + c] = acc[c] / k;
      }
    }
  }

  RgbImage out = image;
  for (std::size_t i = 0; i < n * 3; ++i) {
    out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(buf[i]), 0L, 255L));
  }
  return out;
}

RemoteInpainter::RemoteInpainter(std::string url, std::chrono::milliseconds timeout) : timeout_(timeout) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(Errc::invalid_argument, "inpaint URL needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
}

RgbImage RemoteInpainter::fill(const RgbImage& image, std::span<const std::uint8_t> mask) {
  const auto image_png = encode_rgb_png(image);
  const auto mask_png = encode_mask_png(mask, image.width, image.height);

  httplib::Client client(origin_);
  if (!client.is_valid()) throw unavailable("cannot use " + origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  httplib::MultipartFormDataItems items{
      {"image", std::string(image_png.begin(), image_png.end()), "image.png", "image/png"},
      {"mask", std::string(mask_png.begin(), mask_png.end()), "mask.png", "image/png"},
  };
  const auto res = client.Post(path_, items);
  if (!res) throw unavailable(httplib::to_string(res.error()));
  if (res->status != 200) throw unavailable("HTTP " + std::to_string(res->status));

  RgbImage out;
  try {
    const auto& body = res->body;
    out = decode_rgb_png(std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
  } catch (const Error& e) {
    throw unavailable(std::string("unreadable response: ") + e.what());
  }
  if (out.width != image.width || out.height != image.height) throw unavailable("response has wrong size");
  return out;
}

FallbackInpainter::FallbackInpainter(std::unique_ptr<InpaintBackend> primary, std::unique_ptr<InpaintBackend> fallback,
                                     std::function<void(const std::string&)> warn)
    : primary_(std::move(primary)), fallback_(std::move(fallback)), warn_(std::move(warn)) {}

RgbImage FallbackInpainter::fill(const RgbImage& image, std::span<const std::uint8_t> mask) {
  try {
    return primary_->fill(image, mask);
  } catch (const Error& e) {
    if (e.code() != Errc::backend_unavailable) throw;
    if (warn_) warn_(std::string(e.what()) + "; using " + fallback_->name());
  }
  return fallback_->fill(image, mask);
}

std::unique_ptr<InpaintBackend> make_inpainter(const std::string& remote_url,
                                               std::function<void(const std::string&)> warn) {
  if (remote_url.empty()) return std::make_unique<DiffusionInpainter>();
  return std::make_unique<FallbackInpainter>(std::make_unique<RemoteInpainter>(remote_url),
                                             std::make_unique<DiffusionInpainter>(), std::move(warn));
}

RgbImage inpaint(InpaintBackend& backend, const RgbImage& image, std::span<const std::uint8_t> mask) {
  check_mask(image, mask);
  const auto filled = backend.fill(image, mask);
  if (filled.width != image.width || filled.height != image.height) {
    throw Error(Errc::dimension_mismatch, backend.name() + " returned a differently sized image");
  }
  RgbImage out = image;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    std::copy_n(&filled.data[i * 3], 3, &out.data[i * 3]);
  }
  return out;
}

}  // namespace surgq
