#pragma once

#include <cstddef>
#include <stdexcept>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fisheyesim/error.hpp"

namespace fisheyesim {

struct ImageSize {
  int width = 0;
  int height = 0;

  constexpr bool valid() const noexcept { return width >= 1 && height >= 1; }
  constexpr std::size_t area() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend constexpr bool operator==(const ImageSize&, const ImageSize&) = default;
};

inline std::string to_string(ImageSize s) {
  return std::to_string(s.width) + "x" + std::to_string(s.height);
}

/// Parses "WxH" (e.g. "128x128").
inline ImageSize parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto bad = [&] { return InvalidParameters("expected a size like 128x128, got '" + text + "'"); };
  if (x == std::string::npos || x == 0 || x + 1 >= text.size()) throw bad();
  ImageSize s{};
  try {
    std::size_t used = 0;
    s.width = std::stoi(text.substr(0, x), &used);
    if (used != x) throw bad();
    s.height = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!s.valid()) throw bad();
  return s;
}

inline void require_valid(ImageSize s, const char* what = "image size") {
  if (!s.valid()) {
    throw InvalidParameters(std::string(what) + " must be at least 1x1, got " + to_string(s));
  }
}

/// Row-major 8-bit image with 3 (RGB) or 4 (RGBA) interleaved channels.
class RasterImage {
 public:
  RasterImage() = default;

  RasterImage(ImageSize size, int channels, std::uint8_t fill = 0)
      : size_(size), channels_(channels) {
    require_valid(size);
    if (channels != 3 && channels != 4) {
      throw InvalidParameters("channel count must be 3 or 4, got " + std::to_string(channels));
    }
    data_.assign(size.area() * static_cast<std::size_t>(channels), fill);
  }

  RasterImage(ImageSize size, int channels, std::vector<std::uint8_t> data)
      : RasterImage(size, channels) {
    if (data.size() != data_.size()) {
      throw DimensionMismatch("pixel buffer holds " + std::to_string(data.size()) +
                              " bytes, expected " + std::to_string(data_.size()));
    }
    data_ = std::move(data);
  }

  ImageSize size() const noexcept { return size_; }
  int width() const noexcept { return size_.width; }
  int height() const noexcept { return size_.height; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<std::uint8_t> data() noexcept { return data_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::uint8_t* pixel(int x, int y) noexcept {
    return data_.data() + (static_cast<std::size_t>(y) * size_.width + x) * channels_;
  }
  const std::uint8_t* pixel(int x, int y) const noexcept {
    return data_.data() + (static_cast<std::size_t>(y) * size_.width + x) * channels_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  ImageSize size_{};
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace fisheyesim
