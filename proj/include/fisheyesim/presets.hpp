#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fisheyesim/camera.hpp"
#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"

namespace fisheyesim {

enum class Profile { kSim, kReal };

inline std::string_view profile_name(Profile p) noexcept { return p == Profile::kSim ? "sim" : "real"; }

/// Lens intrinsics as written in presets and config files. The principal
/// point is optional and defaults to the centre of the output image.
struct ModelSpec {
  Family family = Family::kEucm;
  double f = 1.0;
  double alpha = 0.5;  // EUCM and DS
  double beta = 1.0;   // EUCM
  double xi = 0.0;     // DS
  double scale = 1.0;
  std::optional<double> cx;
  std::optional<double> cy;

  CameraModel resolve(ImageSize output) const {
    const double px = cx.value_or(0.5 * output.width);
    const double py = cy.value_or(0.5 * output.height);
    switch (family) {
      case Family::kPinhole: return CameraModel(PinholeParams{f, px, py}, scale);
      case Family::kEucm: return CameraModel(EucmParams{f, alpha, beta, px, py}, scale);
      case Family::kDs: return CameraModel(DsParams{f, alpha, xi, px, py}, scale);
    }
    throw InvalidParameters("unknown camera family");
  }

  static ModelSpec from_model(const CameraModel& m, bool keep_principal_point = true) {
    ModelSpec s;
    s.family = m.family();
    s.scale = m.output_scale();
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          s.f = p.f;
          if (keep_principal_point) {
            s.cx = p.cx;
            s.cy = p.cy;
          }
          if constexpr (std::is_same_v<T, EucmParams>) {
            s.alpha = p.alpha;
            s.beta = p.beta;
          } else if constexpr (std::is_same_v<T, DsParams>) {
            s.alpha = p.alpha;
            s.xi = p.xi;
          }
        },
        m.params());
    return s;
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct CameraPreset {
  std::string name;
  CameraModel model;                    // principal point centred on `output`
  std::optional<double> nominal_fov_deg;
  std::optional<double> fov_cap_deg;    // angular mask applied when rendering
  Profile profile = Profile::kSim;
  ImageSize output{128, 128};
  std::string note;

  std::optional<double> fov_cap_rad() const {
    return fov_cap_deg ? std::optional<double>(deg_to_rad(*fov_cap_deg)) : std::nullopt;
  }

  friend bool operator==(const CameraPreset&, const CameraPreset&) = default;
};

class PresetRegistry {
 public:
  PresetRegistry() = default;

  explicit PresetRegistry(std::vector<CameraPreset> presets) {
    for (auto& p : presets) add(std::move(p));
  }

  void add(CameraPreset p) {
    if (find(p.name)) throw InvalidParameters("duplicate preset name '" + p.name + "'");
    presets_.push_back(std::move(p));
  }

  const CameraPreset* find(std::string_view name) const noexcept {
    auto it = std::find_if(presets_.begin(), presets_.end(), [&](const auto& p) { return p.name == name; });
    return it == presets_.end() ? nullptr : &*it;
  }

  /// Throws UnknownPreset listing the available names.
  const CameraPreset& at(std::string_view name) const {
    if (const CameraPreset* p = find(name)) return *p;
    std::string names;
    for (const auto& p : presets_) names += (names.empty() ? "" : ", ") + p.name;
    throw UnknownPreset("unknown preset '" + std::string(name) + "'; available: " + names);
  }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& p : presets_) n.push_back(p.name);
    return n;
  }

  const std::vector<CameraPreset>& all() const noexcept { return presets_; }

 private:
  std::vector<CameraPreset> presets_;
};

inline constexpr ImageSize kSimResolution{128, 128};
inline constexpr ImageSize kRealResolution{224, 224};

namespace detail {

inline CameraPreset table_preset(std::string name, CameraModel::Params p, double scale, std::string note) {
  CameraPreset c{std::move(name), CameraModel(p, scale).centered_on(kSimResolution), std::nullopt,
                 std::nullopt, Profile::kSim, kSimResolution, std::move(note)};
  return c;
}

inline CameraPreset fov_preset(std::string name, const CameraModel& shape, double fov_deg, Profile profile,
                               ImageSize out, bool cap) {
  const CameraModel centred = shape.centered_on(out);
  const double f = fit_focal_for_fov(centred, deg_to_rad(fov_deg), out);
  CameraPreset c{std::move(name), centred.with_focal(f), fov_deg,
                 cap ? std::optional<double>(fov_deg) : std::nullopt, profile, out,
                 "focal fitted to a " + std::to_string(static_cast<int>(fov_deg)) + " deg horizontal FoV on " +
                     to_string(out)};
  return c;
}

}  // namespace detail

/// The built-in registry: the six lens configurations of the cross-lens study
/// plus the nominal-FoV pinhole and fisheye cameras of the simulated (128 px)
/// and real (224 px) setups. Fisheye nominal presets use the training lens
/// shape (EUCM alpha 0.4, beta 2.0) with the focal fitted to the FoV.
inline const PresetRegistry& builtin_presets() {
  static const PresetRegistry registry = [] {
    using detail::fov_preset;
    using detail::table_preset;
    const CameraModel pinhole_shape(PinholeParams{1.0, 0.0, 0.0});
    const CameraModel fisheye_shape(EucmParams{1.0, 0.4, 2.0, 0.0, 0.0});
    PresetRegistry r;
    r.add(table_preset("seen_param", EucmParams{45.0, 0.4, 2.0}, 0.9, "training lens"));
    r.add(table_preset("param1", EucmParams{60.0, 0.5, 2.0}, 1.0, "unseen lens"));
    r.add(table_preset("param2", DsParams{50.0, 0.5, 0.1}, 1.0, "unseen lens"));
    r.add(table_preset("param3", EucmParams{45.0, 0.4, 2.0}, 1.0, "unseen lens"));
    r.add(table_preset("param4", EucmParams{45.0, 0.4, 2.5}, 1.0, "unseen lens"));
    r.add(table_preset("param5", EucmParams{35.0, 0.4, 1.2}, 1.0, "unseen lens"));
    r.add(fov_preset("sim_pinhole_90", pinhole_shape, 90.0, Profile::kSim, kSimResolution, false));
    r.add(fov_preset("sim_fisheye_235", fisheye_shape, 235.0, Profile::kSim, kSimResolution, true));
    r.add(fov_preset("real_pinhole_60", pinhole_shape, 60.0, Profile::kReal, kRealResolution, false));
    r.add(fov_preset("real_fisheye_180", fisheye_shape, 180.0, Profile::kReal, kRealResolution, true));
    return r;
  }();
  return registry;
}

}  // namespace fisheyesim
