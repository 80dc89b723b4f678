#pragma once

// Precomputed per-pixel lookup tables and the sampler that applies them.
//
// Table coordinates live in sample space: integer values land on source
// pixel centres, so a source of width W accepts x in [-0.5, W - 0.5].

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fisheyesim/camera.hpp"
#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/parallel.hpp"
#include "fisheyesim/sphere.hpp"

namespace fisheyesim {

enum class SourceKind : std::uint8_t {
  kRaster = 0,       // single image
  kEquirect = 1,     // single 2:1 panorama, horizontally periodic
  kCubemap = 2,      // six square faces
};

struct RemapTable {
  SourceKind kind = SourceKind::kRaster;
  ImageSize dst{};
  ImageSize src{};  // face size for cubemap sources
  std::vector<float> coords;         // interleaved (x, y) per destination pixel
  std::vector<std::uint8_t> faces;   // face index per pixel, cubemap sources only
  std::vector<std::uint8_t> mask;    // 1 = valid

  std::size_t size() const noexcept { return dst.area(); }
  bool valid_at(std::size_t i) const noexcept { return mask[i] != 0; }
  float x(std::size_t i) const noexcept { return coords[2 * i]; }
  float y(std::size_t i) const noexcept { return coords[2 * i + 1]; }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (auto m : mask) n += m;
    return n;
  }

  friend bool operator==(const RemapTable&, const RemapTable&) = default;
};

/// Throws InvariantBreach if the table's buffers or coordinates are inconsistent.
inline void check_table(const RemapTable& t) {
  const std::size_t n = t.size();
  if (!t.dst.valid() || !t.src.valid()) throw InvariantBreach("remap table has an empty geometry");
  if (t.coords.size() != 2 * n || t.mask.size() != n) {
    throw InvariantBreach("remap table buffers do not match its destination size");
  }
  if ((t.kind == SourceKind::kCubemap) != (t.faces.size() == n)) {
    throw InvariantBreach("remap table face indices inconsistent with its source kind");
  }
  if (t.kind == SourceKind::kCubemap && t.src.width != t.src.height) {
    throw InvariantBreach("cubemap remap table with non-square faces");
  }
  const float xmax = static_cast<float>(t.src.width) - 0.5f;
  const float ymax = static_cast<float>(t.src.height) - 0.5f;
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.mask[i]) continue;
    if (!(t.x(i) >= -0.5f && t.x(i) <= xmax && t.y(i) >= -0.5f && t.y(i) <= ymax)) {
      throw InvariantBreach("remap table coordinate outside its source bounds");
    }
    if (t.kind == SourceKind::kCubemap && t.faces[i] > 5) {
      throw InvariantBreach("remap table face index out of range");
    }
  }
}

struct SourceSample {
  double x = 0.0;
  double y = 0.0;
  int face = 0;
};

/// Fills a table by evaluating fn(col, row) -> optional<SourceSample> at every
/// destination pixel. Rows are split across `threads` workers (0 = auto).
template <typename Fn>
RemapTable build_table(SourceKind kind, ImageSize dst, ImageSize src, Fn&& fn, int threads = 0) {
  require_valid(dst, "destination size");
  require_valid(src, "source size");
  RemapTable t;
  t.kind = kind;
  t.dst = dst;
  t.src = src;
  t.coords.assign(2 * dst.area(), 0.0f);
  t.mask.assign(dst.area(), 0);
  if (kind == SourceKind::kCubemap) t.faces.assign(dst.area(), 0);
  const float xmax = static_cast<float>(src.width) - 0.5f;
  const float ymax = static_cast<float>(src.height) - 0.5f;
  parallel_for(dst.height, threads, [&](int row_begin, int row_end) {
    for (int j = row_begin; j < row_end; ++j) {
      for (int i = 0; i < dst.width; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * dst.width + i;
        const std::optional<SourceSample> s = fn(i, j);
        if (!s) continue;
        t.coords[2 * k] = std::clamp(static_cast<float>(s->x), -0.5f, xmax);
        t.coords[2 * k + 1] = std::clamp(static_cast<float>(s->y), -0.5f, ymax);
        if (kind == SourceKind::kCubemap) t.faces[k] = static_cast<std::uint8_t>(s->face);
        t.mask[k] = 1;
      }
    }
  });
  return t;
}

inline RemapTable identity_table(ImageSize size, SourceKind kind = SourceKind::kRaster) {
  if (kind == SourceKind::kCubemap) throw InvalidParameters("identity table needs a single-image source");
  return build_table(kind, size, size, [](int i, int j) {
    return std::optional<SourceSample>(SourceSample{double(i), double(j), 0});
  });
}

inline void require_equirect_aspect(ImageSize s, const char* what) {
  require_valid(s, what);
  if (s.width != 2 * s.height) {
    throw AspectError(std::string(what) + " must have width = 2 x height, got " + to_string(s));
  }
}

inline SourceSample cube_sample(const Direction3& d, int face_size) noexcept {
  const CubeFace c = dir_to_cubeface(d);
  return {c.u * face_size - 0.5, c.v * face_size - 0.5, face_index(c.face)};
}

inline SourceSample equirect_sample(const Direction3& d, ImageSize pano) noexcept {
  const PixelCoord p = spherical_to_equirect_px(dir_to_spherical(d), pano);
  return {p.u - 0.5, p.v - 0.5, 0};
}

/// Cubemap -> equirectangular panorama. Every entry is valid.
inline RemapTable build_equirect_from_cubemap(ImageSize dst, int face_size, int threads = 0) {
  require_equirect_aspect(dst, "equirectangular destination");
  if (face_size < 1) throw InvalidParameters("cubemap face size must be positive");
  return build_table(
      SourceKind::kCubemap, dst, ImageSize{face_size, face_size},
      [&](int i, int j) {
        return std::optional<SourceSample>(
            cube_sample(equirect_px_to_dir(i + 0.5, j + 0.5, dst), face_size));
      },
      threads);
}

namespace detail {

inline void check_fov_cap(const CameraModel& m, std::optional<double> fov_cap) {
  if (!fov_cap) return;
  if (!(*fov_cap > 0.0)) throw InvalidParameters("FoV cap must be positive");
  const double limit = max_valid_angle(m);
  if (0.5 * *fov_cap > limit + 1e-9) {
    throw UnachievableFov("FoV cap " + std::to_string(rad_to_deg(*fov_cap)) +
                          " deg exceeds the model's " + std::to_string(rad_to_deg(2.0 * limit)) +
                          " deg domain");
  }
}

// Ray through the centre of destination pixel (i, j), honouring the model's
// validity and the optional angular cap.
inline std::optional<Direction3> camera_ray(const CameraModel& m, int i, int j,
                                            std::optional<double> half_cap) noexcept {
  const UnprojResult r = unproject(m, i + 0.5, j + 0.5);
  if (!r.valid) return std::nullopt;
  if (half_cap) {
    const double off_axis = std::atan2(std::hypot(r.dir.x, r.dir.y), r.dir.z);
    if (off_axis > *half_cap) return std::nullopt;
  }
  return r.dir;
}

}  // namespace detail

/// Camera image <- equirectangular panorama. Pixels whose ray is outside the
/// model domain, or further off-axis than fov_cap / 2, are masked.
inline RemapTable build_fisheye_from_equirect(const CameraModel& m, ImageSize dst, ImageSize src,
                                              std::optional<double> fov_cap = std::nullopt,
                                              int threads = 0) {
  require_equirect_aspect(src, "equirectangular source");
  detail::check_fov_cap(m, fov_cap);
  const std::optional<double> half_cap =
      fov_cap ? std::optional<double>(0.5 * *fov_cap) : std::nullopt;
  return build_table(
      SourceKind::kEquirect, dst, src,
      [&](int i, int j) -> std::optional<SourceSample> {
        const auto d = detail::camera_ray(m, i, j, half_cap);
        if (!d) return std::nullopt;
        return equirect_sample(*d, src);
      },
      threads);
}

/// Camera image <- cubemap in one step, the limit of composing the two stages
/// with an infinitely fine intermediate panorama.
inline RemapTable build_fisheye_from_cubemap(const CameraModel& m, ImageSize dst, int face_size,
                                             std::optional<double> fov_cap = std::nullopt,
                                             int threads = 0) {
  if (face_size < 1) throw InvalidParameters("cubemap face size must be positive");
  detail::check_fov_cap(m, fov_cap);
  const std::optional<double> half_cap =
      fov_cap ? std::optional<double>(0.5 * *fov_cap) : std::nullopt;
  return build_table(
      SourceKind::kCubemap, dst, ImageSize{face_size, face_size},
      [&](int i, int j) -> std::optional<SourceSample> {
        const auto d = detail::camera_ray(m, i, j, half_cap);
        if (!d) return std::nullopt;
        return cube_sample(*d, face_size);
      },
      threads);
}

/// Chains two tables: result(p) = inner(outer(p)). Inner coordinates are
/// interpolated bilinearly when all contributing inner entries are valid (and
/// on the same cube face); otherwise the nearest inner entry is used.
inline RemapTable compose(const RemapTable& outer, const RemapTable& inner) {
  if (outer.kind == SourceKind::kCubemap) {
    throw GeometryMismatch("outer table of a composition must read a single image");
  }
  if (outer.src != inner.dst) {
    throw GeometryMismatch("outer table reads " + to_string(outer.src) + " but inner table produces " +
                           to_string(inner.dst));
  }
  const int iw = inner.dst.width, ih = inner.dst.height;
  const bool outer_wraps = outer.kind == SourceKind::kEquirect;
  const bool inner_wraps = inner.kind == SourceKind::kEquirect;
  const double inner_period = inner.src.width;

  auto wrap_col = [&](int c) {
    if (outer_wraps) return ((c % iw) + iw) % iw;
    return std::clamp(c, 0, iw - 1);
  };

  return build_table(inner.kind, outer.dst, inner.src, [&](int i, int j) -> std::optional<SourceSample> {
    const std::size_t k = static_cast<std::size_t>(j) * outer.dst.width + i;
    if (!outer.valid_at(k)) return std::nullopt;
    const double ox = outer.x(k), oy = outer.y(k);
    const int x0 = static_cast<int>(std::floor(ox));
    const int y0 = static_cast<int>(std::floor(oy));
    const double fx = ox - x0, fy = oy - y0;

    const std::array<int, 2> cols = {wrap_col(x0), wrap_col(x0 + 1)};
    const std::array<int, 2> rows = {std::clamp(y0, 0, ih - 1), std::clamp(y0 + 1, 0, ih - 1)};
    const std::array<double, 4> w = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    std::array<std::size_t, 4> idx{};
    for (int q = 0; q < 4; ++q) {
      idx[q] = static_cast<std::size_t>(rows[q / 2]) * iw + cols[q % 2];
    }

    bool blend = true;
    int first = -1;
    for (int q = 0; q < 4; ++q) {
      if (w[q] == 0.0) continue;
      if (!inner.valid_at(idx[q])) { blend = false; break; }
      if (first < 0) first = q;
      if (inner.kind == SourceKind::kCubemap && inner.faces[idx[q]] != inner.faces[idx[first]]) {
        blend = false;
        break;
      }
    }

    if (blend && first >= 0) {
      const double ref_x = inner.x(idx[first]);
      double sx = 0.0, sy = 0.0;
      for (int q = 0; q < 4; ++q) {
        if (w[q] == 0.0) continue;
        double x = inner.x(idx[q]);
        if (inner_wraps) {
          // Unwrap across the panorama seam before averaging.
          if (x - ref_x > 0.5 * inner_period) x -= inner_period;
          if (ref_x - x > 0.5 * inner_period) x += inner_period;
        }
        sx += w[q] * x;
        sy += w[q] * inner.y(idx[q]);
      }
      if (inner_wraps) {
        sx = std::fmod(sx + 0.5, inner_period);
        if (sx < 0.0) sx += inner_period;
        sx -= 0.5;
      }
      return SourceSample{sx, sy, inner.kind == SourceKind::kCubemap ? inner.faces[idx[first]] : 0};
    }

    // Nearest inner entry.
    const int nc = wrap_col(static_cast<int>(std::floor(ox + 0.5)));
    const int nr = std::clamp(static_cast<int>(std::floor(oy + 0.5)), 0, ih - 1);
    const std::size_t n = static_cast<std::size_t>(nr) * iw + nc;
    if (!inner.valid_at(n)) return std::nullopt;
    return SourceSample{inner.x(n), inner.y(n), inner.kind == SourceKind::kCubemap ? inner.faces[n] : 0};
  }, 0);
}

// ---------------------------------------------------------------------------
// Sampling

enum class Interpolation { kNearest, kBilinear };
enum class Border { kBlack, kClamp };

struct SamplerConfig {
  Interpolation interpolation = Interpolation::kBilinear;
  Border border = Border::kClamp;
  bool seam_wrap = true;  // horizontal wrap for equirectangular sources
};

/// Fills one pixel with opaque black.
inline void set_black(std::uint8_t* px, int channels) noexcept {
  px[0] = px[1] = px[2] = 0;
  if (channels == 4) px[3] = 255;
}

namespace detail {

struct Plane {
  const std::uint8_t* data;
  int width;
  int height;
  int channels;
};

class Sampler {
 public:
  Sampler(const SamplerConfig& cfg, bool periodic)
      : cfg_(cfg), wrap_(periodic && cfg.seam_wrap) {}

  void sample(const Plane& p, float x, float y, std::uint8_t* out) const noexcept {
    if (cfg_.interpolation == Interpolation::kNearest) {
      const int ix = static_cast<int>(std::floor(x + 0.5f));
      const int iy = static_cast<int>(std::floor(y + 0.5f));
      const std::uint8_t* s = tap(p, ix, iy);
      if (!s) return set_black(out, p.channels);
      for (int c = 0; c < p.channels; ++c) out[c] = s[c];
      return;
    }
    const float fx0 = std::floor(x), fy0 = std::floor(y);
    const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
    const float ax = x - fx0, ay = y - fy0;
    const float w00 = (1.0f - ax) * (1.0f - ay), w10 = ax * (1.0f - ay);
    const float w01 = (1.0f - ax) * ay, w11 = ax * ay;
    const std::uint8_t* s00 = tap(p, x0, y0);
    const std::uint8_t* s10 = tap(p, x0 + 1, y0);
    const std::uint8_t* s01 = tap(p, x0, y0 + 1);
    const std::uint8_t* s11 = tap(p, x0 + 1, y0 + 1);
    for (int c = 0; c < p.channels; ++c) {
      const float black = (c == 3) ? 255.0f : 0.0f;
      const float v = w00 * (s00 ? s00[c] : black) + w10 * (s10 ? s10[c] : black) +
                      w01 * (s01 ? s01[c] : black) + w11 * (s11 ? s11[c] : black);
      out[c] = static_cast<std::uint8_t>(std::min(255.0f, std::max(0.0f, v + 0.5f)));
    }
  }

 private:
  // Pointer to a source pixel, or nullptr for a black border tap.
  const std::uint8_t* tap(const Plane& p, int ix, int iy) const noexcept {
    if (wrap_) {
      ix %= p.width;
      if (ix < 0) ix += p.width;
    } else if (ix < 0 || ix >= p.width) {
      if (cfg_.border == Border::kBlack) return nullptr;
      ix = std::clamp(ix, 0, p.width - 1);
    }
    if (iy < 0 || iy >= p.height) {
      if (cfg_.border == Border::kBlack) return nullptr;
      iy = std::clamp(iy, 0, p.height - 1);
    }
    return p.data + (static_cast<std::size_t>(iy) * p.width + ix) * p.channels;
  }

  SamplerConfig cfg_;
  bool wrap_;
};

inline RasterImage apply_planes(const RemapTable& t, std::span<const Plane> planes, int channels,
                                const SamplerConfig& cfg, int threads) {
  RasterImage out(t.dst, channels);
  const Sampler sampler(cfg, t.kind == SourceKind::kEquirect);
  std::uint8_t* dst = out.data().data();
  parallel_for(t.dst.height, threads, [&](int row_begin, int row_end) {
    for (int j = row_begin; j < row_end; ++j) {
      std::size_t k = static_cast<std::size_t>(j) * t.dst.width;
      std::uint8_t* px = dst + k * channels;
      for (int i = 0; i < t.dst.width; ++i, ++k, px += channels) {
        if (!t.mask[k]) {
          set_black(px, channels);
          continue;
        }
        const Plane& p = planes[t.kind == SourceKind::kCubemap ? t.faces[k] : 0];
        sampler.sample(p, t.coords[2 * k], t.coords[2 * k + 1], px);
      }
    }
  });
  return out;
}

}  // namespace detail

/// Resamples a single-image source through the table.
inline RasterImage apply(const RemapTable& t, const RasterImage& src, const SamplerConfig& cfg = {},
                         int threads = 1) {
  if (t.kind == SourceKind::kCubemap) {
    throw DimensionMismatch("table expects six cubemap faces, got one image");
  }
  if (src.size() != t.src) {
    throw DimensionMismatch("table expects a " + to_string(t.src) + " source, got " +
                            to_string(src.size()));
  }
  const detail::Plane plane{src.data().data(), src.width(), src.height(), src.channels()};
  return detail::apply_planes(t, std::span<const detail::Plane>(&plane, 1), src.channels(), cfg,
                              threads);
}

/// Resamples six cubemap faces (indexed by Face) through the table.
inline RasterImage apply(const RemapTable& t, std::span<const RasterImage, 6> faces,
                         const SamplerConfig& cfg = {}, int threads = 1) {
  if (t.kind != SourceKind::kCubemap) {
    throw DimensionMismatch("table expects a single source image, got cubemap faces");
  }
  std::array<detail::Plane, 6> planes{};
  const int channels = faces[0].channels();
  for (std::size_t f = 0; f < 6; ++f) {
    if (faces[f].size() != t.src || faces[f].channels() != channels) {
      throw DimensionMismatch("cubemap face " + std::string(face_name(static_cast<Face>(f))) +
                              " is " + to_string(faces[f].size()) + ", table expects " +
                              to_string(t.src));
    }
    planes[f] = {faces[f].data().data(), faces[f].width(), faces[f].height(), channels};
  }
  return detail::apply_planes(t, planes, channels, cfg, threads);
}

}  // namespace fisheyesim
