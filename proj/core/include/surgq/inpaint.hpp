#pragma once

// Inpainting behind a backend interface: a remote HTTP service when one is
// configured, and a local diffusion fill that always works offline.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "surgq/image_io.hpp"

namespace surgq {

class InpaintBackend {
 public:
  virtual ~InpaintBackend() = default;

  /// Raw backend output; callers should go through inpaint() so unmasked
  /// pixels are guaranteed untouched.
  virtual RgbImage fill(const RgbImage& image, std::span<const std::uint8_t> mask) = 0;
  virtual std::string name() const = 0;
};

inline constexpr int kDiffusionSweeps = 64;

/// Masked pixels start at the mean of the unmasked pixels bordering the mask,
/// then take `sweeps` Gauss-Seidel passes of 4-neighbour averaging.
class DiffusionInpainter final : public InpaintBackend {
 public:
  explicit DiffusionInpainter(int sweeps = kDiffusionSweeps) : sweeps_(sweeps) {}

  RgbImage fill(const RgbImage& image, std::span<const std::uint8_t> mask) override;
  std::string name() const override { return "diffusion"; }

 private:
  int sweeps_;
};

/// POSTs multipart fields "image" and "mask" (both PNG) to `url` and expects
/// a PNG body back. Any transport or protocol failure is BackendUnavailable.
class RemoteInpainter final : public InpaintBackend {
 public:
  explicit RemoteInpainter(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30));

  RgbImage fill(const RgbImage& image, std::span<const std::uint8_t> mask) override;
  std::string name() const override { return "remote"; }

 private:
  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

/// Tries `primary`; on BackendUnavailable reports through `warn` and uses
/// `fallback`.
class FallbackInpainter final : public InpaintBackend {
 public:
  FallbackInpainter(std::unique_ptr<InpaintBackend> primary, std::unique_ptr<InpaintBackend> fallback,
                    std::function<void(const std::string&)> warn = {});

  RgbImage fill(const RgbImage& image, std::span<const std::uint8_t> mask) override;
  std::string name() const override { return primary_->name() + "+" + fallback_->name(); }

 private:
  std::unique_ptr<InpaintBackend> primary_;
  std::unique_ptr<InpaintBackend> fallback_;
  std::function<void(const std::string&)> warn_;
};

/// Remote-with-fallback when `remote_url` is non-empty, diffusion otherwise.
std::unique_ptr<InpaintBackend> make_inpainter(const std::string& remote_url,
                                               std::function<void(const std::string&)> warn = {});

/// Validates the mask (same size, non-empty), runs the backend and copies
/// only masked pixels from its output.
RgbImage inpaint(InpaintBackend& backend, const RgbImage& image, std::span<const std::uint8_t> mask);

}  // namespace surgq
