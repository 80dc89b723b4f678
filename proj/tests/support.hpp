#pragma once

// Fixtures and independent reference implementations for the test suite.
// Nothing here calls the library code it is used to check.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fisheyesim/image.hpp"
#include "fisheyesim/pipeline.hpp"

namespace testsupport {

using namespace fisheyesim;

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto p = std::filesystem::temp_directory_path() /
           ("fisheyesim_" + tag + "_" + std::to_string(rng() % 1000000000ull));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline RasterImage solid(ImageSize s, std::array<std::uint8_t, 3> rgb) {
  RasterImage img(s, 3);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      std::uint8_t* p = img.pixel(x, y);
      p[0] = rgb[0];
      p[1] = rgb[1];
      p[2] = rgb[2];
    }
  }
  return img;
}

inline RasterImage noise(ImageSize s, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RasterImage img(s, channels);
  for (auto& b : img.data()) b = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

/// Distinct, non-black colour per face, indexed front, back, right, left, up, down.
inline constexpr std::array<std::array<std::uint8_t, 3>, 6> kFaceColors = {{
    {255, 0, 0}, {0, 0, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 255}, {0, 255, 255}}};

inline CubemapFaces solid_cubemap(int n) {
  std::array<RasterImage, 6> faces;
  for (int f = 0; f < 6; ++f) faces[f] = solid({n, n}, kFaceColors[f]);
  return CubemapFaces(std::move(faces));
}

inline CubemapFaces noise_cubemap(int n, std::uint64_t seed, int channels = 3) {
  std::array<RasterImage, 6> faces;
  for (int f = 0; f < 6; ++f) faces[f] = noise({n, n}, channels, seed + f);
  return CubemapFaces(std::move(faces));
}

// Face axes written out longhand: forward, right, down.
inline constexpr double kAxes[6][3][3] = {
    {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},    // front
    {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}},  // back
    {{1, 0, 0}, {0, 0, -1}, {0, 1, 0}},   // right
    {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},   // left
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},   // up
    {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}},   // down
};

/// Cubemap whose colour is a smooth function of the viewing direction, so
/// different resampling paths agree to within rounding.
inline CubemapFaces smooth_cubemap(int n) {
  std::array<RasterImage, 6> faces;
  for (int f = 0; f < 6; ++f) {
    RasterImage img({n, n}, 3);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double a = (2.0 * i + 1.0) / n - 1.0, b = (2.0 * j + 1.0) / n - 1.0;
        double d[3];
        for (int k = 0; k < 3; ++k) d[k] = kAxes[f][0][k] + a * kAxes[f][1][k] + b * kAxes[f][2][k];
        const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        std::uint8_t* p = img.pixel(i, j);
        p[0] = static_cast<std::uint8_t>(std::lround(127.5 + 100.0 * d[0] / len));
        p[1] = static_cast<std::uint8_t>(std::lround(127.5 + 100.0 * d[1] / len));
        p[2] = static_cast<std::uint8_t>(std::lround(127.5 + 60.0 * d[2] / len + 40.0 * d[0] * d[1] / (len * len)));
      }
    }
    faces[f] = std::move(img);
  }
  return CubemapFaces(std::move(faces));
}

/// Reference cube lookup: face with the largest forward component (first in
/// +x, -x, +y, -y, +z, -z order on ties) and its [0, 1] face coordinates.
struct RefCube {
  int face;
  double u, v;
};

inline RefCube ref_cubeface(double x, double y, double z) {
  // Tie order by axis sign: right, left, down, up, front, back.
  const int order[6] = {2, 3, 5, 4, 0, 1};
  int best = -1;
  double best_dot = -1e300;
  for (int f : order) {
    const double dp = kAxes[f][0][0] * x + kAxes[f][0][1] * y + kAxes[f][0][2] * z;
    if (dp > best_dot) {
      best_dot = dp;
      best = f;
    }
  }
  const double a = (kAxes[best][1][0] * x + kAxes[best][1][1] * y + kAxes[best][1][2] * z) / best_dot;
  const double b = (kAxes[best][2][0] * x + kAxes[best][2][1] * y + kAxes[best][2][2] * z) / best_dot;
  return {best, 0.5 * (a + 1.0), 0.5 * (b + 1.0)};
}

/// Reference EUCM projection in long double.
inline bool ref_eucm(long double f, long double alpha, long double beta, long double cx, long double cy,
                     long double x, long double y, long double z, long double& u, long double& v) {
  const long double d = std::sqrt(beta * (x * x + y * y) + z * z);
  const long double den = alpha * d + (1 - alpha) * z;
  if (den <= 0) return false;
  u = f * x / den + cx;
  v = f * y / den + cy;
  return true;
}

/// Straightforward double-precision sampler used as the oracle for the
/// table applier: masked pixels are opaque black, nearest rounds half up,
/// bilinear weighs the four neighbours of the sample point.
inline RasterImage ref_apply(const RemapTable& t, const std::vector<const RasterImage*>& src,
                             bool bilinear, bool clamp, bool wrap) {
  const int ch = src[0]->channels();
  RasterImage out(t.dst, ch);
  auto fetch = [&](const RasterImage& img, long ix, long iy, int c, bool& ok) -> double {
    ok = true;
    const long w = img.width(), h = img.height();
    if (wrap) {
      ix = ((ix % w) + w) % w;
    } else if (ix < 0 || ix >= w) {
      if (!clamp) { ok = false; return c == 3 ? 255.0 : 0.0; }
      ix = ix < 0 ? 0 : w - 1;
    }
    if (iy < 0 || iy >= h) {
      if (!clamp) { ok = false; return c == 3 ? 255.0 : 0.0; }
      iy = iy < 0 ? 0 : h - 1;
    }
    return img.pixel(static_cast<int>(ix), static_cast<int>(iy))[c];
  };
  for (int j = 0; j < t.dst.height; ++j) {
    for (int i = 0; i < t.dst.width; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * t.dst.width + i;
      std::uint8_t* px = out.pixel(i, j);
      if (!t.mask[k]) {
        for (int c = 0; c < ch; ++c) px[c] = (c == 3) ? 255 : 0;
        continue;
      }
      const RasterImage& img = *src[t.kind == SourceKind::kCubemap ? t.faces[k] : 0];
      const double x = t.coords[2 * k], y = t.coords[2 * k + 1];
      bool ok;
      if (!bilinear) {
        const long ix = static_cast<long>(std::floor(x + 0.5)), iy = static_cast<long>(std::floor(y + 0.5));
        for (int c = 0; c < ch; ++c) px[c] = static_cast<std::uint8_t>(fetch(img, ix, iy, c, ok));
        continue;
      }
      const long x0 = static_cast<long>(std::floor(x)), y0 = static_cast<long>(std::floor(y));
      const double ax = x - x0, ay = y - y0;
      for (int c = 0; c < ch; ++c) {
        const double v = (1 - ax) * (1 - ay) * fetch(img, x0, y0, c, ok) + ax * (1 - ay) * fetch(img, x0 + 1, y0, c, ok) +
                         (1 - ax) * ay * fetch(img, x0, y0 + 1, c, ok) + ax * ay * fetch(img, x0 + 1, y0 + 1, c, ok);
        px[c] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

inline int max_abs_diff(const RasterImage& a, const RasterImage& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(int(a.data()[i]) - int(b.data()[i])));
  return m;
}

/// Random table with coordinates spread over (and slightly past) the source.
inline RemapTable random_table(SourceKind kind, ImageSize dst, ImageSize src, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-0.5, src.width - 0.5), uy(-0.5, src.height - 0.5);
  std::uniform_int_distribution<int> face(0, 5);
  std::bernoulli_distribution masked(0.1);
  return build_table(
      kind, dst, src,
      [&](int, int) -> std::optional<SourceSample> {
        if (masked(rng)) return std::nullopt;
        return SourceSample{ux(rng), uy(rng), kind == SourceKind::kCubemap ? face(rng) : 0};
      },
      1);
}

inline std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport
