#pragma once

// Coordinate conventions shared by every stage of the pipeline.
//
// Camera frame: +z forward along the optical axis, +x right, +y down, so the
// image u axis grows with x and the v axis grows with y.
//
// Equirectangular panoramas put longitude 0 (forward) at the horizontal
// centre, longitude grows to the right, and row 0 is the up pole
// (latitude +pi/2). Pixel coordinates are continuous: pixel (i, j) covers
// [i, i+1) x [j, j+1) and its centre sits at (i + 0.5, j + 0.5).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"

namespace fisheyesim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Ray direction in the camera frame. Values returned by this module are unit
/// length; use normalized() when building one from arbitrary components.
struct Direction3 {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
  friend constexpr bool operator==(const Direction3&, const Direction3&) = default;
};

inline Direction3 normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw RangeError("cannot normalize a zero or non-finite vector");
  }
  return {x / n, y / n, z / n};
}

inline double dot(const Direction3& a, const Direction3& b) noexcept {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Angle between two unit directions, stable for tiny angles.
inline double angle_between(const Direction3& a, const Direction3& b) noexcept {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(a, b));
}

struct SphericalCoord {
  double lon = 0.0;  // [-pi, pi), 0 = forward, +pi/2 = right
  double lat = 0.0;  // [-pi/2, pi/2], +pi/2 = up
};

inline SphericalCoord dir_to_spherical(const Direction3& d) noexcept {
  SphericalCoord s;
  const double sy = std::clamp(-d.y, -1.0, 1.0);
  s.lat = std::asin(sy);
  if (d.x == 0.0 && d.z == 0.0) {
    // Poles: longitude is undefined, pin it to 0.
    s.lon = 0.0;
    s.lat = sy > 0.0 ? kHalfPi : -kHalfPi;
    return s;
  }
  s.lon = std::atan2(d.x, d.z);
  if (s.lon >= kPi) s.lon -= kTwoPi;
  return s;
}

inline Direction3 spherical_to_dir(const SphericalCoord& s) noexcept {
  const double cl = std::cos(s.lat);
  return {cl * std::sin(s.lon), -std::sin(s.lat), cl * std::cos(s.lon)};
}

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

inline PixelCoord spherical_to_equirect_px(const SphericalCoord& s, ImageSize size) noexcept {
  return {(s.lon / kTwoPi + 0.5) * size.width, (0.5 - s.lat / kPi) * size.height};
}

inline Direction3 equirect_px_to_dir(double u, double v, ImageSize size) {
  require_valid(size, "equirectangular size");
  if (!(u >= 0.0 && u < size.width && v >= 0.0 && v <= size.height)) {
    throw RangeError("equirectangular pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                     ") outside " + to_string(size));
  }
  const SphericalCoord s{(u / size.width - 0.5) * kTwoPi, (0.5 - v / size.height) * kPi};
  return spherical_to_dir(s);
}

// ---------------------------------------------------------------------------
// Cubemap

enum class Face : int { kFront = 0, kBack = 1, kRight = 2, kLeft = 3, kUp = 4, kDown = 5 };

inline constexpr std::array<Face, 6> kAllFaces = {Face::kFront, Face::kBack, Face::kRight,
                                                  Face::kLeft,  Face::kUp,   Face::kDown};

constexpr int face_index(Face f) noexcept { return static_cast<int>(f); }

constexpr std::string_view face_name(Face f) noexcept {
  constexpr std::array<std::string_view, 6> names = {"front", "back", "right",
                                                     "left",  "up",   "down"};
  return names[static_cast<std::size_t>(f)];
}

struct IntAxis {
  int x, y, z;
};

/// How each face's pinhole image sits in the camera frame. A face pixel at
/// normalized offsets (a, b) in [-1, 1] looks along forward + a*right + b*down.
/// Side faces share +y as "down"; the up face has the front at its bottom
/// edge and the down face has the front at its top edge.
struct FaceOrientation {
  IntAxis forward;
  IntAxis right;
  IntAxis down;
};

inline constexpr std::array<FaceOrientation, 6> kFaceOrientation = {{
    {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},     // front
    {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}},   // back
    {{1, 0, 0}, {0, 0, -1}, {0, 1, 0}},    // right
    {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},    // left
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},    // up
    {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}},    // down
}};

constexpr const FaceOrientation& orientation(Face f) noexcept {
  return kFaceOrientation[static_cast<std::size_t>(f)];
}

inline double dot(const IntAxis& a, const Direction3& d) noexcept {
  return a.x * d.x + a.y * d.y + a.z * d.z;
}

struct CubeFace {
  Face face = Face::kFront;
  double u = 0.5;  // [0, 1], grows along the face's right axis
  double v = 0.5;  // [0, 1], grows along the face's down axis
};

/// Selects the face of the dominant axis. Ties resolve in the fixed order
/// +x, -x, +y, -y, +z, -z.
inline CubeFace dir_to_cubeface(const Direction3& d) noexcept {
  const double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
  Face face;
  if (ax >= ay && ax >= az) {
    face = d.x >= 0.0 ? Face::kRight : Face::kLeft;
  } else if (ay >= az) {
    face = d.y >= 0.0 ? Face::kDown : Face::kUp;
  } else {
    face = d.z >= 0.0 ? Face::kFront : Face::kBack;
  }
  const FaceOrientation& o = orientation(face);
  const double depth = dot(o.forward, d);
  const double a = dot(o.right, d) / depth;
  const double b = dot(o.down, d) / depth;
  return {face, std::clamp(0.5 * (a + 1.0), 0.0, 1.0), std::clamp(0.5 * (b + 1.0), 0.0, 1.0)};
}

inline Direction3 cubeface_to_dir(const CubeFace& c) {
  const FaceOrientation& o = orientation(c.face);
  const double a = 2.0 * c.u - 1.0;
  const double b = 2.0 * c.v - 1.0;
  return normalized(o.forward.x + a * o.right.x + b * o.down.x,
                    o.forward.y + a * o.right.y + b * o.down.y,
                    o.forward.z + a * o.right.z + b * o.down.z);
}

}  // namespace fisheyesim
