#pragma once

// Run configuration and preset files (YAML).
//
// Parsing is strict: unknown keys, wrong types and conflicting entries are
// rejected with the 1-based line they appear on.
// The schema is described in docs/config.md.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/presets.hpp"
#include "fisheyesim/remap_cache.hpp"

namespace fisheyesim {

struct InputSpec {
  enum class Kind { kCubemap, kEquirect, kImages };
  Kind kind = Kind::kCubemap;
  std::string path;                 // cubemap directory or equirect file
  std::vector<std::string> images;  // image list
  friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

struct CameraSpec {
  std::optional<std::string> preset;
  std::optional<ModelSpec> model;
  std::optional<ImageSize> size;
  std::optional<double> fov_cap_deg;
  friend bool operator==(const CameraSpec&, const CameraSpec&) = default;
};

enum class AugmentMode { kNone, kRsa, kFixed, kSweep };

struct AugmentSpec {
  AugmentMode mode = AugmentMode::kNone;
  std::optional<double> s_lo;
  std::optional<double> s_hi;
  std::optional<double> scale;
  std::optional<std::vector<double>> scales;
  std::optional<ImageSize> target;
  friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

struct RunConfig {
  InputSpec input;
  std::optional<CameraSpec> camera;
  AugmentSpec augmentation;
  std::optional<std::string> output_dir;
  std::optional<std::string> cache_dir;
  std::optional<std::uint64_t> seed;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline std::string_view augment_mode_name(AugmentMode m) noexcept {
  switch (m) {
    case AugmentMode::kNone: return "none";
    case AugmentMode::kRsa: return "rsa";
    case AugmentMode::kFixed: return "fixed";
    case AugmentMode::kSweep: return "sweep";
  }
  return "none";
}

namespace detail::yaml {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

inline void require_map(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw ConfigError(where + " must be a mapping", line_of(n));
}

/// Rejects keys outside `allowed`, naming the key and its line.
inline void check_keys(const YAML::Node& n, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : n) {
    const std::string key = kv.first.Scalar();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError("unknown key '" + key + "' in " + where + " (expected one of: " + list + ")",
                        line_of(kv.first));
    }
  }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) throw ConfigError(what + " must be a scalar", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value '" + n.Scalar() + "' for " + what, line_of(n));
  }
}

inline double number(const YAML::Node& n, const std::string& what) {
  const double v = scalar<double>(n, what);
  if (!std::isfinite(v)) throw ConfigError(what + " must be finite", line_of(n));
  return v;
}

inline ImageSize size(const YAML::Node& n, const std::string& what) {
  try {
    return parse_size(scalar<std::string>(n, what));
  } catch (const InvalidParameters& e) {
    throw ConfigError(what + ": " + e.what(), line_of(n));
  }
}

inline Family family(const YAML::Node& n) {
  const std::string s = scalar<std::string>(n, "model.family");
  if (s == "pinhole") return Family::kPinhole;
  if (s == "eucm") return Family::kEucm;
  if (s == "ds") return Family::kDs;
  throw ConfigError("unknown camera family '" + s + "' (expected pinhole, eucm or ds)", line_of(n));
}

inline ModelSpec model(const YAML::Node& n, const std::string& where) {
  require_map(n, where);
  check_keys(n, where, {"family", "f", "alpha", "beta", "xi", "scale", "cx", "cy"});
  if (!n["family"]) throw ConfigError(where + " needs a 'family'", line_of(n));
  if (!n["f"]) throw ConfigError(where + " needs a focal length 'f'", line_of(n));
  ModelSpec m;
  m.family = family(n["family"]);
  m.f = number(n["f"], where + ".f");
  auto only_for = [&](const char* key, std::initializer_list<Family> fams) {
    if (!n[key]) return false;
    if (std::find(fams.begin(), fams.end(), m.family) == fams.end()) {
      throw ConfigError("key '" + std::string(key) + "' does not apply to family " +
                            std::string(family_name(m.family)),
                        line_of(n[key]));
    }
    return true;
  };
  if (only_for("alpha", {Family::kEucm, Family::kDs})) m.alpha = number(n["alpha"], where + ".alpha");
  if (only_for("beta", {Family::kEucm})) m.beta = number(n["beta"], where + ".beta");
  if (only_for("xi", {Family::kDs})) m.xi = number(n["xi"], where + ".xi");
  if (n["scale"]) m.scale = number(n["scale"], where + ".scale");
  if (n["cx"]) m.cx = number(n["cx"], where + ".cx");
  if (n["cy"]) m.cy = number(n["cy"], where + ".cy");
  try {
    (void)m.resolve(ImageSize{1, 1});
  } catch (const InvalidParameters& e) {
    throw ConfigError(where + ": " + e.what(), line_of(n));
  }
  return m;
}

inline void emit_model(YAML::Emitter& out, const ModelSpec& m) {
  out << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << std::string(family_name(m.family));
  out << YAML::Key << "f" << YAML::Value << exact_double(m.f);
  if (m.family != Family::kPinhole) out << YAML::Key << "alpha" << YAML::Value << exact_double(m.alpha);
  if (m.family == Family::kEucm) out << YAML::Key << "beta" << YAML::Value << exact_double(m.beta);
  if (m.family == Family::kDs) out << YAML::Key << "xi" << YAML::Value << exact_double(m.xi);
  out << YAML::Key << "scale" << YAML::Value << exact_double(m.scale);
  if (m.cx) out << YAML::Key << "cx" << YAML::Value << exact_double(*m.cx);
  if (m.cy) out << YAML::Key << "cy" << YAML::Value << exact_double(*m.cy);
  out << YAML::EndMap;
}

inline YAML::Node load_text(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ": " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace detail::yaml

/// Parses the inline model form used on the command line, e.g.
/// "eucm:f=45,alpha=0.4,beta=2.0,scale=0.9" or "pinhole:f=64".
inline ModelSpec parse_model_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string fam = text.substr(0, colon);
  ModelSpec m;
  if (fam == "pinhole") m.family = Family::kPinhole;
  else if (fam == "eucm") m.family = Family::kEucm;
  else if (fam == "ds") m.family = Family::kDs;
  else throw InvalidParameters("unknown camera family '" + fam + "' in model '" + text + "'");
  bool have_f = false;
  std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    const std::size_t comma = std::min(rest.find(',', pos), rest.size());
    const std::string item = rest.substr(pos, comma - pos);
    pos = comma + 1;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidParameters("expected key=value in model, got '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || end != val.data() + val.size() || !std::isfinite(v)) {
      throw InvalidParameters("invalid number '" + val + "' for model key '" + key + "'");
    }
    const bool fisheye = m.family != Family::kPinhole;
    if (key == "f") { m.f = v; have_f = true; }
    else if (key == "alpha" && fisheye) m.alpha = v;
    else if (key == "beta" && m.family == Family::kEucm) m.beta = v;
    else if (key == "xi" && m.family == Family::kDs) m.xi = v;
    else if (key == "scale") m.scale = v;
    else if (key == "cx") m.cx = v;
    else if (key == "cy") m.cy = v;
    else throw InvalidParameters("unknown key '" + key + "' for " + fam + " model");
  }
  if (!have_f) throw InvalidParameters("model '" + text + "' needs a focal length f");
  (void)m.resolve(ImageSize{1, 1});
  return m;
}

/// Parses and validates a run configuration. Preset references are checked
/// against `registry`.
inline RunConfig parse_config(const std::string& text, const PresetRegistry& registry = builtin_presets(),
                              const std::string& origin = "config") {
  using namespace detail::yaml;
  const YAML::Node root = load_text(text, origin);
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  require_map(root, "configuration");
  check_keys(root, "configuration", {"input", "camera", "augmentation", "output_dir", "cache_dir", "seed"});

  RunConfig cfg;
  const YAML::Node input = root["input"];
  if (!input) throw ConfigError("configuration needs an 'input' section", line_of(root));
  require_map(input, "input");
  check_keys(input, "input", {"cubemap", "equirect", "images"});
  if (input.size() != 1) {
    throw ConfigError("input must name exactly one of cubemap, equirect or images", line_of(input));
  }
  if (input["cubemap"]) {
    cfg.input.kind = InputSpec::Kind::kCubemap;
    cfg.input.path = scalar<std::string>(input["cubemap"], "input.cubemap");
  } else if (input["equirect"]) {
    cfg.input.kind = InputSpec::Kind::kEquirect;
    cfg.input.path = scalar<std::string>(input["equirect"], "input.equirect");
  } else {
    cfg.input.kind = InputSpec::Kind::kImages;
    const YAML::Node list = input["images"];
    if (!list.IsSequence() || list.size() == 0) {
      throw ConfigError("input.images must be a non-empty list", line_of(list));
    }
    for (const auto& item : list) cfg.input.images.push_back(scalar<std::string>(item, "input.images entry"));
  }

  if (const YAML::Node cam = root["camera"]) {
    require_map(cam, "camera");
    check_keys(cam, "camera", {"preset", "model", "size", "fov_cap"});
    CameraSpec c;
    if (cam["preset"] && cam["model"]) {
      throw ConfigError("camera takes either 'preset' or 'model', not both", line_of(cam["model"]));
    }
    if (cam["preset"]) {
      c.preset = scalar<std::string>(cam["preset"], "camera.preset");
      try {
        (void)registry.at(*c.preset);
      } catch (const UnknownPreset& e) {
        throw ConfigError(e.what(), line_of(cam["preset"]));
      }
    }
    if (cam["model"]) c.model = model(cam["model"], "camera.model");
    if (cam["size"]) c.size = size(cam["size"], "camera.size");
    if (cam["fov_cap"]) {
      c.fov_cap_deg = number(cam["fov_cap"], "camera.fov_cap");
      if (!(*c.fov_cap_deg > 0.0)) throw ConfigError("camera.fov_cap must be positive", line_of(cam["fov_cap"]));
    }
    cfg.camera = c;
  }

  if (const YAML::Node aug = root["augmentation"]) {
    require_map(aug, "augmentation");
    check_keys(aug, "augmentation", {"mode", "s_lo", "s_hi", "scale", "scales", "target"});
    AugmentSpec& a = cfg.augmentation;
    if (aug["mode"]) {
      const std::string m = scalar<std::string>(aug["mode"], "augmentation.mode");
      if (m == "none") a.mode = AugmentMode::kNone;
      else if (m == "rsa") a.mode = AugmentMode::kRsa;
      else if (m == "fixed") a.mode = AugmentMode::kFixed;
      else if (m == "sweep") a.mode = AugmentMode::kSweep;
      else throw ConfigError("unknown augmentation mode '" + m + "' (expected none, rsa, fixed or sweep)",
                             line_of(aug["mode"]));
    }
    if (aug["s_lo"]) a.s_lo = number(aug["s_lo"], "augmentation.s_lo");
    if (aug["s_hi"]) a.s_hi = number(aug["s_hi"], "augmentation.s_hi");
    if (aug["scale"]) a.scale = number(aug["scale"], "augmentation.scale");
    if (aug["scales"]) {
      const YAML::Node list = aug["scales"];
      if (!list.IsSequence() || list.size() == 0) {
        throw ConfigError("augmentation.scales must be a non-empty list", line_of(list));
      }
      a.scales.emplace();
      for (const auto& s : list) {
        const double v = number(s, "augmentation.scales entry");
        if (!(v > 0.0)) throw ConfigError("sweep scales must be positive", line_of(s));
        a.scales->push_back(v);
      }
    }
    if (aug["target"]) a.target = size(aug["target"], "augmentation.target");
    const double lo = a.s_lo.value_or(0.7), hi = a.s_hi.value_or(1.3);
    if (!(lo > 0.0 && lo <= hi)) {
      throw ConfigError("augmentation bounds must satisfy 0 < s_lo <= s_hi", line_of(aug));
    }
    if (a.scale && !(*a.scale > 0.0 && *a.scale <= 1.0)) {
      throw ConfigError("augmentation.scale must lie in (0, 1]", line_of(aug["scale"]));
    }
  }

  if (root["output_dir"]) cfg.output_dir = scalar<std::string>(root["output_dir"], "output_dir");
  if (root["cache_dir"]) cfg.cache_dir = scalar<std::string>(root["cache_dir"], "cache_dir");
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, const PresetRegistry& registry = builtin_presets()) {
  return parse_config(detail::yaml::read_text(path), registry, path.string());
}

inline std::string format_config(const RunConfig& cfg) {
  using detail::yaml::emit_model;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "input" << YAML::Value << YAML::BeginMap;
  switch (cfg.input.kind) {
    case InputSpec::Kind::kCubemap: out << YAML::Key << "cubemap" << YAML::Value << cfg.input.path; break;
    case InputSpec::Kind::kEquirect: out << YAML::Key << "equirect" << YAML::Value << cfg.input.path; break;
    case InputSpec::Kind::kImages:
      out << YAML::Key << "images" << YAML::Value << YAML::BeginSeq;
      for (const auto& s : cfg.input.images) out << s;
      out << YAML::EndSeq;
      break;
  }
  out << YAML::EndMap;
  if (cfg.camera) {
    const CameraSpec& c = *cfg.camera;
    out << YAML::Key << "camera" << YAML::Value << YAML::BeginMap;
    if (c.preset) out << YAML::Key << "preset" << YAML::Value << *c.preset;
    if (c.model) {
      out << YAML::Key << "model" << YAML::Value;
      emit_model(out, *c.model);
    }
    if (c.size) out << YAML::Key << "size" << YAML::Value << to_string(*c.size);
    if (c.fov_cap_deg) out << YAML::Key << "fov_cap" << YAML::Value << exact_double(*c.fov_cap_deg);
    out << YAML::EndMap;
  }
  const AugmentSpec& a = cfg.augmentation;
  out << YAML::Key << "augmentation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(augment_mode_name(a.mode));
  if (a.s_lo) out << YAML::Key << "s_lo" << YAML::Value << exact_double(*a.s_lo);
  if (a.s_hi) out << YAML::Key << "s_hi" << YAML::Value << exact_double(*a.s_hi);
  if (a.scale) out << YAML::Key << "scale" << YAML::Value << exact_double(*a.scale);
  if (a.scales) {
    out << YAML::Key << "scales" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double s : *a.scales) out << exact_double(s);
    out << YAML::EndSeq;
  }
  if (a.target) out << YAML::Key << "target" << YAML::Value << to_string(*a.target);
  out << YAML::EndMap;
  if (cfg.output_dir) out << YAML::Key << "output_dir" << YAML::Value << *cfg.output_dir;
  if (cfg.cache_dir) out << YAML::Key << "cache_dir" << YAML::Value << *cfg.cache_dir;
  if (cfg.seed) out << YAML::Key << "seed" << YAML::Value << *cfg.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

inline void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
  const std::string text = format_config(cfg);
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------
// Preset files

/// YAML for a registry. Fitted focal lengths are written out so that loading
/// the file needs no refit; a comment records where each came from.
inline std::string format_presets(const PresetRegistry& registry) {
  YAML::Emitter out;
  out << YAML::Comment("Camera presets. Fitted focal lengths are stored, not recomputed.");
  out << YAML::BeginMap << YAML::Key << "presets" << YAML::Value << YAML::BeginSeq;
  for (const CameraPreset& p : registry.all()) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << p.name;
    out << YAML::Key << "profile" << YAML::Value << std::string(profile_name(p.profile));
    out << YAML::Key << "size" << YAML::Value << to_string(p.output);
    if (p.nominal_fov_deg) out << YAML::Key << "nominal_fov" << YAML::Value << exact_double(*p.nominal_fov_deg);
    if (p.fov_cap_deg) out << YAML::Key << "fov_cap" << YAML::Value << exact_double(*p.fov_cap_deg);
    if (!p.note.empty()) out << YAML::Key << "note" << YAML::Value << p.note;
    out << YAML::Key << "model" << YAML::Value;
    detail::yaml::emit_model(out, ModelSpec::from_model(p.model));
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

inline PresetRegistry parse_presets(const std::string& text, const std::string& origin = "presets") {
  using namespace detail::yaml;
  const YAML::Node root = load_text(text, origin);
  if (!root || !root.IsMap()) throw ConfigError("preset file must be a mapping with a 'presets' list");
  check_keys(root, "preset file", {"presets"});
  const YAML::Node list = root["presets"];
  if (!list || !list.IsSequence()) throw ConfigError("'presets' must be a list", line_of(root));
  PresetRegistry reg;
  for (const auto& item : list) {
    require_map(item, "preset");
    check_keys(item, "preset", {"name", "profile", "size", "nominal_fov", "fov_cap", "note", "model"});
    if (!item["name"] || !item["model"] || !item["size"]) {
      throw ConfigError("preset needs 'name', 'size' and 'model'", line_of(item));
    }
    CameraPreset p;
    p.name = scalar<std::string>(item["name"], "preset.name");
    p.output = size(item["size"], "preset.size");
    if (item["profile"]) {
      const std::string prof = scalar<std::string>(item["profile"], "preset.profile");
      if (prof == "sim") p.profile = Profile::kSim;
      else if (prof == "real") p.profile = Profile::kReal;
      else throw ConfigError("unknown profile '" + prof + "' (expected sim or real)", line_of(item["profile"]));
    }
    if (item["nominal_fov"]) p.nominal_fov_deg = number(item["nominal_fov"], "preset.nominal_fov");
    if (item["fov_cap"]) p.fov_cap_deg = number(item["fov_cap"], "preset.fov_cap");
    if (item["note"]) p.note = scalar<std::string>(item["note"], "preset.note");
    p.model = model(item["model"], "preset.model").resolve(p.output);
    try {
      reg.add(std::move(p));
    } catch (const InvalidParameters& e) {
      throw ConfigError(e.what(), line_of(item["name"]));
    }
  }
  return reg;
}

}  // namespace fisheyesim
