#pragma once

// Six pinhole faces -> equirectangular panorama -> lens image.

#include <array>
#include <optional>
#include <span>

#include "fisheyesim/camera.hpp"
#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/remap.hpp"
#include "fisheyesim/remap_cache.hpp"
#include "fisheyesim/sphere.hpp"

namespace fisheyesim {

/// Six square 90-degree views, indexed by Face, all the same size and
/// channel count.
class CubemapFaces {
 public:
  explicit CubemapFaces(std::array<RasterImage, 6> faces) : faces_(std::move(faces)) {
    const RasterImage& front = faces_[0];
    for (Face f : kAllFaces) {
      const RasterImage& img = (*this)[f];
      if (img.empty()) {
        throw InvalidParameters("cubemap face " + std::string(face_name(f)) + " is missing");
      }
      if (img.width() != img.height()) {
        throw InvalidParameters("cubemap face " + std::string(face_name(f)) + " is not square (" +
                                to_string(img.size()) + ")");
      }
      if (img.size() != front.size() || img.channels() != front.channels()) {
        throw InvalidParameters("cubemap face " + std::string(face_name(f)) + " is " +
                                to_string(img.size()) + "x" + std::to_string(img.channels()) +
                                ", front is " + to_string(front.size()) + "x" +
                                std::to_string(front.channels()));
      }
    }
  }

  const RasterImage& operator[](Face f) const noexcept { return faces_[face_index(f)]; }
  int face_size() const noexcept { return faces_[0].width(); }
  int channels() const noexcept { return faces_[0].channels(); }
  std::span<const RasterImage, 6> span() const noexcept { return faces_; }
  const std::array<RasterImage, 6>& images() const noexcept { return faces_; }

 private:
  std::array<RasterImage, 6> faces_;
};

/// RasterImage with a 2:1 aspect ratio.
class EquirectImage {
 public:
  explicit EquirectImage(RasterImage img) : image_(std::move(img)) {
    require_equirect_aspect(image_.size(), "equirectangular image");
  }
  const RasterImage& image() const noexcept { return image_; }
  ImageSize size() const noexcept { return image_.size(); }

  friend bool operator==(const EquirectImage&, const EquirectImage&) = default;

 private:
  RasterImage image_;
};

/// Default panorama size for a lens image: 4x its width, 2:1.
inline ImageSize default_equirect_size(ImageSize fisheye) {
  return {4 * fisheye.width, 2 * fisheye.width};
}

namespace detail {

template <typename Build>
RemapTable cached_or_built(TableCache* cache, const TableRecipe& recipe, Build&& build) {
  if (cache) return cache->get_or_build(recipe, build);
  return build();
}

}  // namespace detail

inline RemapTable equirect_from_cubemap_table(ImageSize dst, int face_size, TableCache* cache = nullptr) {
  const TableRecipe recipe{"equirect_from_cubemap", std::nullopt, dst, {face_size, face_size}, std::nullopt};
  return detail::cached_or_built(cache, recipe, [&] { return build_equirect_from_cubemap(dst, face_size); });
}

inline RemapTable fisheye_from_equirect_table(const CameraModel& m, ImageSize dst, ImageSize src,
                                              std::optional<double> fov_cap, TableCache* cache = nullptr) {
  const TableRecipe recipe{"fisheye_from_equirect", m, dst, src, fov_cap};
  return detail::cached_or_built(cache, recipe,
                                 [&] { return build_fisheye_from_equirect(m, dst, src, fov_cap); });
}

inline RemapTable fisheye_from_cubemap_table(const CameraModel& m, ImageSize dst, int face_size,
                                             std::optional<double> fov_cap, TableCache* cache = nullptr) {
  const TableRecipe recipe{"fisheye_from_cubemap", m, dst, {face_size, face_size}, fov_cap};
  return detail::cached_or_built(cache, recipe,
                                 [&] { return build_fisheye_from_cubemap(m, dst, face_size, fov_cap); });
}

inline EquirectImage cubemap_to_equirect(const CubemapFaces& faces, ImageSize dst,
                                         const SamplerConfig& cfg = {}, TableCache* cache = nullptr) {
  const RemapTable t = equirect_from_cubemap_table(dst, faces.face_size(), cache);
  return EquirectImage(apply(t, faces.span(), cfg));
}

inline RasterImage equirect_to_fisheye(const EquirectImage& pano, const CameraModel& m, ImageSize dst,
                                       const SamplerConfig& cfg = {},
                                       std::optional<double> fov_cap = std::nullopt,
                                       TableCache* cache = nullptr) {
  const RemapTable t = fisheye_from_equirect_table(m, dst, pano.size(), fov_cap, cache);
  return apply(t, pano.image(), cfg);
}

/// Lens render straight from the cubemap through one fused table.
inline RasterImage render_fisheye(const CubemapFaces& faces, const CameraModel& m, ImageSize dst,
                                  const SamplerConfig& cfg = {},
                                  std::optional<double> fov_cap = std::nullopt,
                                  TableCache* cache = nullptr) {
  const RemapTable t = fisheye_from_cubemap_table(m, dst, faces.face_size(), fov_cap, cache);
  return apply(t, faces.span(), cfg);
}

/// Explicit cubemap -> panorama -> lens chain.
inline RasterImage render_fisheye_two_stage(const CubemapFaces& faces, const CameraModel& m, ImageSize dst,
                                            const SamplerConfig& cfg = {},
                                            std::optional<double> fov_cap = std::nullopt,
                                            std::optional<ImageSize> pano_size = std::nullopt) {
  const EquirectImage pano = cubemap_to_equirect(faces, pano_size.value_or(default_equirect_size(dst)), cfg);
  return equirect_to_fisheye(pano, m, dst, cfg, fov_cap);
}

/// Rectilinear render with the given horizontal FoV (radians, < pi).
inline RasterImage render_pinhole(const CubemapFaces& faces, double fov, ImageSize dst,
                                  const SamplerConfig& cfg = {}, TableCache* cache = nullptr) {
  const CameraModel shape = CameraModel(PinholeParams{1.0, 0.0, 0.0}).centered_on(dst);
  const double f = fit_focal_for_fov(shape, fov, dst);
  return render_fisheye(faces, shape.with_focal(f), dst, cfg, std::nullopt, cache);
}

namespace detail {

struct IntVec {
  long long x, y, z;
};

inline long long idot(const IntAxis& a, const IntVec& v) { return a.x * v.x + a.y * v.y + a.z * v.z; }

}  // namespace detail

/// Rotates the whole cubemap by +90 degrees of yaw (toward +x): the old front
/// view becomes the right view, right becomes back, and so on, with the up
/// and down faces turned in-plane to match. The panorama of the result is the
/// original panorama shifted right by a quarter of its width.
inline CubemapFaces rotate_yaw_quarter(const CubemapFaces& faces) {
  const int n = faces.face_size();
  const int ch = faces.channels();
  std::array<RasterImage, 6> out;
  for (Face f : kAllFaces) {
    RasterImage img(ImageSize{n, n}, ch);
    const FaceOrientation& o = orientation(f);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        // Direction of pixel (i, j) scaled by n so all components are integers.
        const long long a = 2 * i + 1 - n, b = 2 * j + 1 - n;
        const detail::IntVec d{o.forward.x * n + a * o.right.x + b * o.down.x,
                               o.forward.y * n + a * o.right.y + b * o.down.y,
                               o.forward.z * n + a * o.right.z + b * o.down.z};
        // The rotation maps (x, y, z) to (z, y, -x); sample its inverse.
        const detail::IntVec src{-d.z, d.y, d.x};
        Face sf = Face::kFront;
        for (Face g : kAllFaces) {
          if (detail::idot(orientation(g).forward, src) == n) {
            sf = g;
            break;
          }
        }
        const FaceOrientation& so = orientation(sf);
        const long long sa = detail::idot(so.right, src), sb = detail::idot(so.down, src);
        const int si = static_cast<int>((sa + n - 1) / 2), sj = static_cast<int>((sb + n - 1) / 2);
        const std::uint8_t* s = faces[sf].pixel(si, sj);
        std::copy(s, s + ch, img.pixel(i, j));
      }
    }
    out[face_index(f)] = std::move(img);
  }
  return CubemapFaces(std::move(out));
}

}  // namespace fisheyesim
