#pragma once

// Pinhole, Extended Unified (EUCM) and Double Sphere (DS) lens models.
//
// Projection and unprojection follow the closed forms of the double sphere
// camera-model family (Usenko et al.). All three share one focal length for
// both axes and a principal point in pixels. The output scale multiplies the
// focal length, zooming the image about the principal point.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/sphere.hpp"

namespace fisheyesim {

struct PinholeParams {
  double f = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  friend bool operator==(const PinholeParams&, const PinholeParams&) = default;
};

struct EucmParams {
  double f = 1.0;
  double alpha = 0.5;  // shape, (0, 1]
  double beta = 1.0;   // distortion, > 0
  double cx = 0.0;
  double cy = 0.0;
  friend bool operator==(const EucmParams&, const EucmParams&) = default;
};

struct DsParams {
  double f = 1.0;
  double alpha = 0.5;  // blend between the two spheres, (0, 1]
  double xi = 0.0;     // offset between sphere centres, >= 0
  double cx = 0.0;
  double cy = 0.0;
  friend bool operator==(const DsParams&, const DsParams&) = default;
};

enum class Family { kPinhole, kEucm, kDs };

inline std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::kPinhole: return "pinhole";
    case Family::kEucm: return "eucm";
    case Family::kDs: return "ds";
  }
  return "?";
}

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct ProjResult {
  double u = 0.0;
  double v = 0.0;
  bool valid = false;
};

struct UnprojResult {
  Direction3 dir{};
  bool valid = false;
};

class CameraModel {
 public:
  using Params = std::variant<PinholeParams, EucmParams, DsParams>;

  CameraModel() : CameraModel(PinholeParams{}) {}

  explicit CameraModel(Params params, double output_scale = 1.0)
      : params_(params), output_scale_(output_scale) {
    validate();
  }

  const Params& params() const noexcept { return params_; }
  double output_scale() const noexcept { return output_scale_; }

  Family family() const noexcept { return static_cast<Family>(params_.index()); }

  double focal() const noexcept {
    return std::visit([](const auto& p) { return p.f; }, params_);
  }
  double effective_focal() const noexcept { return focal() * output_scale_; }

  PixelCoord principal_point() const noexcept {
    return std::visit([](const auto& p) { return PixelCoord{p.cx, p.cy}; }, params_);
  }

  CameraModel with_focal(double f) const {
    Params p = params_;
    std::visit([f](auto& q) { q.f = f; }, p);
    return CameraModel(p, output_scale_);
  }

  CameraModel with_principal_point(double cx, double cy) const {
    Params p = params_;
    std::visit([cx, cy](auto& q) { q.cx = cx; q.cy = cy; }, p);
    return CameraModel(p, output_scale_);
  }

  /// Principal point at the geometric image centre.
  CameraModel centered_on(ImageSize size) const {
    return with_principal_point(0.5 * size.width, 0.5 * size.height);
  }

  CameraModel with_output_scale(double s) const { return CameraModel(params_, s); }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;

 private:
  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(output_scale_ > 0.0) || !finite(output_scale_)) {
      throw InvalidParameters("output scale must be positive, got " + std::to_string(output_scale_));
    }
    std::visit(
        [&](const auto& p) {
          if (!(p.f > 0.0) || !finite(p.f)) {
            throw InvalidParameters("focal length must be positive, got " + std::to_string(p.f));
          }
          if (!finite(p.cx) || !finite(p.cy)) {
            throw InvalidParameters("principal point must be finite");
          }
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, EucmParams>) {
            if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
              throw InvalidParameters("EUCM alpha must lie in (0, 1], got " + std::to_string(p.alpha));
            }
            if (!(p.beta > 0.0) || !finite(p.beta)) {
              throw InvalidParameters("EUCM beta must be positive, got " + std::to_string(p.beta));
            }
          } else if constexpr (std::is_same_v<T, DsParams>) {
            if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
              throw InvalidParameters("DS alpha must lie in (0, 1], got " + std::to_string(p.alpha));
            }
            if (!(p.xi >= 0.0) || !finite(p.xi)) {
              throw InvalidParameters("DS xi must be non-negative, got " + std::to_string(p.xi));
            }
          }
        },
        params_);
  }

  Params params_;
  double output_scale_;
};

namespace detail {

// Half-space constant of the unified-model projection domain.
inline double unified_w(double alpha) noexcept {
  return alpha <= 0.5 ? alpha / (1.0 - alpha) : (1.0 - alpha) / alpha;
}

inline ProjResult project_normalized(const PinholeParams&, const Point3& p) noexcept {
  if (!(p.z > 0.0)) return {};
  return {p.x / p.z, p.y / p.z, true};
}

inline ProjResult project_normalized(const EucmParams& k, const Point3& p) noexcept {
  const double r2 = p.x * p.x + p.y * p.y;
  const double d = std::sqrt(k.beta * r2 + p.z * p.z);
  const double denom = k.alpha * d + (1.0 - k.alpha) * p.z;
  if (!(denom > 0.0)) return {};
  if (!(p.z > -unified_w(k.alpha) * d)) return {};
  return {p.x / denom, p.y / denom, true};
}

inline ProjResult project_normalized(const DsParams& k, const Point3& p) noexcept {
  const double r2 = p.x * p.x + p.y * p.y;
  const double d1 = std::sqrt(r2 + p.z * p.z);
  const double zs = k.xi * d1 + p.z;
  const double d2 = std::sqrt(r2 + zs * zs);
  const double denom = k.alpha * d2 + (1.0 - k.alpha) * zs;
  if (!(denom > 0.0)) return {};
  const double w1 = unified_w(k.alpha);
  const double w2 = (w1 + k.xi) / std::sqrt(2.0 * w1 * k.xi + k.xi * k.xi + 1.0);
  if (!(p.z > -w2 * d1)) return {};
  return {p.x / denom, p.y / denom, true};
}

inline std::optional<Point3> unproject_normalized(const PinholeParams&, double mx, double my) noexcept {
  return Point3{mx, my, 1.0};
}

inline std::optional<Point3> unproject_normalized(const EucmParams& k, double mx, double my) noexcept {
  const double r2 = mx * mx + my * my;
  const double gamma = 1.0 - (2.0 * k.alpha - 1.0) * k.beta * r2;
  if (gamma < 0.0) return std::nullopt;
  const double mz = (1.0 - k.beta * k.alpha * k.alpha * r2) /
                    (k.alpha * std::sqrt(gamma) + (1.0 - k.alpha));
  return Point3{mx, my, mz};
}

inline std::optional<Point3> unproject_normalized(const DsParams& k, double mx, double my) noexcept {
  const double r2 = mx * mx + my * my;
  const double gamma = 1.0 - (2.0 * k.alpha - 1.0) * r2;
  if (gamma < 0.0) return std::nullopt;
  const double mz = (1.0 - k.alpha * k.alpha * r2) / (k.alpha * std::sqrt(gamma) + (1.0 - k.alpha));
  const double disc = mz * mz + (1.0 - k.xi * k.xi) * r2;
  if (disc < 0.0) return std::nullopt;
  const double s = (mz * k.xi + std::sqrt(disc)) / (mz * mz + r2);
  return Point3{s * mx, s * my, s * mz - k.xi};
}

}  // namespace detail

/// Projects a camera-frame point to pixels. Rays outside the model's domain
/// come back with valid == false.
inline ProjResult project(const CameraModel& m, const Point3& p) noexcept {
  if (p.x == 0.0 && p.y == 0.0 && p.z == 0.0) return {};
  const ProjResult n =
      std::visit([&](const auto& k) { return detail::project_normalized(k, p); }, m.params());
  if (!n.valid || !std::isfinite(n.u) || !std::isfinite(n.v)) return {};
  const double f = m.effective_focal();
  const PixelCoord c = m.principal_point();
  return {f * n.u + c.u, f * n.v + c.v, true};
}

inline ProjResult project(const CameraModel& m, const Direction3& d) noexcept {
  return project(m, Point3{d.x, d.y, d.z});
}

/// Unit ray for a pixel. Invalid when the pixel lies outside the model's
/// image circle or the recovered ray is outside the projection domain.
inline UnprojResult unproject(const CameraModel& m, double u, double v) noexcept {
  const double f = m.effective_focal();
  const PixelCoord c = m.principal_point();
  const double mx = (u - c.u) / f;
  const double my = (v - c.v) / f;
  const std::optional<Point3> p =
      std::visit([&](const auto& k) { return detail::unproject_normalized(k, mx, my); }, m.params());
  if (!p) return {};
  const double n = std::sqrt(p->x * p->x + p->y * p->y + p->z * p->z);
  if (!(n > 0.0) || !std::isfinite(n)) return {};
  const Direction3 d{p->x / n, p->y / n, p->z / n};
  if (!project(m, d).valid) return {};
  return {d, true};
}

/// Pixel radius of the model's image circle, or nullopt when every pixel
/// radius unprojects (alpha <= 0.5 and pinhole).
inline std::optional<double> image_circle_radius(const CameraModel& m) noexcept {
  const double f = m.effective_focal();
  return std::visit(
      [f](const auto& k) -> std::optional<double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, EucmParams>) {
          if (k.alpha > 0.5) return f / std::sqrt(k.beta * (2.0 * k.alpha - 1.0));
        } else if constexpr (std::is_same_v<T, DsParams>) {
          if (k.alpha > 0.5) return f / std::sqrt(2.0 * k.alpha - 1.0);
        }
        return std::nullopt;
      },
      m.params());
}

namespace detail {

// Largest angle in [0, pi] for which pred holds, assuming pred is true at 0
// and switches to false exactly once.
template <typename Pred>
double bisect_angle(Pred&& pred) {
  double lo = 0.0, hi = kPi;
  if (pred(hi)) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline bool inside_image(const ProjResult& r, ImageSize size) noexcept {
  return r.valid && r.u >= 0.0 && r.u <= size.width && r.v >= 0.0 && r.v <= size.height;
}

}  // namespace detail

/// Supremum of the angle off the optical axis that the model can project at
/// all, independent of image bounds.
inline double max_valid_angle(const CameraModel& m) {
  return detail::bisect_angle([&](double t) {
    return project(m, Point3{std::sin(t), 0.0, std::cos(t)}).valid;
  });
}

struct FovReport {
  double horizontal_half = 0.0;  // radians, through the principal point
  double diagonal_half = 0.0;    // radians, toward the nearest image corner
  double horizontal_fov() const noexcept { return 2.0 * horizontal_half; }
};

/// Off-axis angles at which rays leave the image (or the model's domain),
/// found by bisection along the horizontal axis and the image diagonal.
inline FovReport fov_report(const CameraModel& m, ImageSize size) {
  require_valid(size);
  const PixelCoord c = m.principal_point();
  auto along = [&](double azimuth) {
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    return detail::bisect_angle([&](double t) {
      const double st = std::sin(t);
      return detail::inside_image(project(m, Point3{ca * st, sa * st, std::cos(t)}), size);
    });
  };
  FovReport r;
  r.horizontal_half = std::min(along(0.0), along(kPi));
  double diag = std::numeric_limits<double>::infinity();
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const double dx = sx > 0 ? size.width - c.u : c.u;
      const double dy = sy > 0 ? size.height - c.v : c.v;
      diag = std::min(diag, along(std::atan2(sy * dy, sx * dx)));
    }
  }
  r.diagonal_half = diag;
  return r;
}

/// Horizontal half field of view in radians; the headline FoV is twice this.
inline double max_half_fov(const CameraModel& m, ImageSize size) {
  return fov_report(m, size).horizontal_half;
}

/// Focal length (before output scale) at which the model's horizontal FoV on
/// `size` equals target_fov. Distortion parameters, principal point and
/// output scale are taken from `shape`.
inline double fit_focal_for_fov(const CameraModel& shape, double target_fov, ImageSize size) {
  require_valid(size);
  const double target_half = 0.5 * target_fov;
  const double limit = max_valid_angle(shape);
  if (!(target_half > 0.0) || !(target_half < limit)) {
    throw UnachievableFov(std::string(family_name(shape.family())) + " model cannot reach " +
                          std::to_string(rad_to_deg(target_fov)) + " deg (domain limit " +
                          std::to_string(rad_to_deg(2.0 * limit)) + " deg)");
  }
  // FoV decreases with focal length; bisect in log space.
  double lo = std::log(1e-9), hi = std::log(1e9);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double half = max_half_fov(shape.with_focal(std::exp(mid)), size);
    (half > target_half ? lo : hi) = mid;
  }
  const double f = std::exp(0.5 * (lo + hi));
  const double got = max_half_fov(shape.with_focal(f), size);
  if (std::abs(got - target_half) > deg_to_rad(0.025)) {
    throw UnachievableFov("focal fit for " + std::to_string(rad_to_deg(target_fov)) +
                          " deg converged to " + std::to_string(rad_to_deg(2.0 * got)) + " deg");
  }
  return f;
}

}  // namespace fisheyesim
