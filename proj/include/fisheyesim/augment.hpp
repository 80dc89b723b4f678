#pragma once

// Random Scale Augmentation and the fixed-crop baseline.
//
// center_scale(img, s) keeps a centred window s times the image size and
// resizes it to the target. For s > 1 the window is larger than the image
// and the surplus reads as black, which amounts to shrinking the image and
// padding it with a black border of (1 - 1/s) / 2 of the output per side.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/remap.hpp"

namespace fisheyesim {

struct CropWindow {
  double x = 0.0;  // continuous left edge in source pixels
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

/// Round half up.
inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

/// Source window read by center_scale. Zoom-in windows are snapped to whole
/// pixels (size rounded half up, offset floored); zoom-out windows keep their
/// exact fractional extent.
inline CropWindow center_window(ImageSize src, double s) {
  require_valid(src, "source image");
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw InvalidParameters("scale factor must be positive, got " + std::to_string(s));
  }
  if (s <= 1.0) {
    const int cw = round_half_up(s * src.width);
    const int ch = round_half_up(s * src.height);
    if (cw < 1 || ch < 1) {
      throw DegenerateCrop("scale " + std::to_string(s) + " leaves an empty crop of " +
                           to_string(src));
    }
    return {double((src.width - cw) / 2), double((src.height - ch) / 2), double(cw), double(ch)};
  }
  const double ww = s * src.width, wh = s * src.height;
  return {0.5 * (src.width - ww), 0.5 * (src.height - wh), ww, wh};
}

/// Bilinear resample of `window` onto a `target`-sized image. Output pixels
/// whose centre falls outside the source are black.
inline RasterImage resample_window(const RasterImage& img, const CropWindow& w, ImageSize target) {
  require_valid(target, "target size");
  if (img.empty()) throw InvalidParameters("cannot resample an empty image");
  RasterImage out(target, img.channels());
  const double sx = w.width / target.width, sy = w.height / target.height;
  const SamplerConfig cfg{Interpolation::kBilinear, Border::kClamp, false};
  const detail::Sampler sampler(cfg, false);
  const detail::Plane plane{img.data().data(), img.width(), img.height(), img.channels()};
  for (int j = 0; j < target.height; ++j) {
    const double y = w.y + (j + 0.5) * sy;
    for (int i = 0; i < target.width; ++i) {
      const double x = w.x + (i + 0.5) * sx;
      std::uint8_t* px = out.pixel(i, j);
      if (x < 0.0 || x >= img.width() || y < 0.0 || y >= img.height()) {
        set_black(px, img.channels());
        continue;
      }
      sampler.sample(plane, static_cast<float>(x - 0.5), static_cast<float>(y - 0.5), px);
    }
  }
  return out;
}

inline RasterImage center_scale(const RasterImage& img, double s, ImageSize target) {
  if (img.empty()) throw InvalidParameters("cannot scale an empty image");
  return resample_window(img, center_window(img.size(), s), target);
}

/// Baseline augmentation: a constant zoom-in crop (never zooms out).
inline RasterImage fixed_crop(const RasterImage& img, double scale, ImageSize target) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw InvalidParameters("fixed crop scale must lie in (0, 1], got " + std::to_string(scale));
  }
  return center_scale(img, scale, target);
}

struct RsaConfig {
  double s_lo = 0.7;
  double s_hi = 1.3;
  ImageSize target{128, 128};
  std::uint64_t seed = 0;

  void validate() const {
    if (!(s_lo > 0.0) || !(s_lo <= s_hi) || !std::isfinite(s_hi)) {
      throw InvalidParameters("scale bounds must satisfy 0 < s_lo <= s_hi, got [" +
                              std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]");
    }
    require_valid(target, "target size");
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic stream of scale draws. Stream k of seed s is independent of
/// every other (s, k) pair, so a worker pool can give each file its own
/// stream and get results independent of scheduling.
class ScaleStream {
 public:
  explicit ScaleStream(std::uint64_t seed, std::uint64_t stream_index = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream_index + 0x632be59bd9b4e019ull))) {}

  /// Uniform in [0, 1) with 53 random bits; identical on every platform.
  double next_unit() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next_scale(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

 private:
  std::mt19937_64 engine_;
};

struct RsaResult {
  RasterImage image;
  double scale = 1.0;
};

inline RsaResult rsa_apply(const RasterImage& img, const RsaConfig& cfg, ScaleStream& stream) {
  cfg.validate();
  const double s = stream.next_scale(cfg.s_lo, cfg.s_hi);
  return {center_scale(img, s, cfg.target), s};
}

struct SweepSpec {
  std::vector<double> scales = {0.70, 0.85, 1.00, 1.15, 1.30};
  ImageSize target{128, 128};

  void validate() const {
    if (scales.empty()) throw InvalidParameters("scale sweep needs at least one scale");
    for (double s : scales) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidParameters("sweep scales must be positive, got " + std::to_string(s));
      }
    }
    require_valid(target, "target size");
  }
};

inline std::vector<RasterImage> scale_sweep(const RasterImage& img, const SweepSpec& spec) {
  spec.validate();
  std::vector<RasterImage> out;
  out.reserve(spec.scales.size());
  for (double s : spec.scales) out.push_back(center_scale(img, s, spec.target));
  return out;
}

}  // namespace fisheyesim
