// fisheyesim: batch front end for lens rendering, panoramas and augmentation.
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error,
// 3 internal invariant breach.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fisheyesim/augment.hpp"
#include "fisheyesim/config.hpp"
#include "fisheyesim/parallel.hpp"
#include "fisheyesim/pipeline.hpp"
#include "fisheyesim/png_io.hpp"
#include "fisheyesim/presets.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fisheyesim;

namespace {

constexpr ImageSize kDefaultFisheyeSize{128, 128};

struct Options {
  std::string config;
  std::string cubemap, equirect, in, out, preset, model, size, target, interp = "bilinear";
  std::string cache, mode, scales, cache_dir = ".";
  std::optional<double> fov_cap, s_lo, s_hi, scale;
  std::optional<int> width;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool json = false;
  std::string name;
};

std::optional<RunConfig> maybe_config(const Options& o) {
  if (o.config.empty()) return std::nullopt;
  return load_config(o.config);
}

SamplerConfig sampler_from(const std::string& interp) {
  SamplerConfig cfg;
  if (interp == "nearest") cfg.interpolation = Interpolation::kNearest;
  else if (interp == "bilinear") cfg.interpolation = Interpolation::kBilinear;
  else throw InvalidParameters("--interp must be nearest or bilinear, got '" + interp + "'");
  return cfg;
}

struct ResolvedCamera {
  CameraModel model;
  ImageSize size;
  std::optional<double> fov_cap_deg;
  std::string label;
};

// Camera from flags, falling back to the config file. A preset rendered at a
// size other than its native one keeps its angular geometry: focal and
// principal point scale with the width.
ResolvedCamera resolve_camera(const Options& o, const std::optional<RunConfig>& cfg) {
  std::optional<CameraSpec> cam = cfg ? cfg->camera : std::nullopt;
  std::string preset = o.preset, model = o.model;
  if (!o.preset.empty() || !o.model.empty()) cam.reset();
  if (!preset.empty() && !model.empty()) throw InvalidParameters("use either --preset or --model, not both");
  std::optional<ImageSize> size;
  if (!o.size.empty()) size = parse_size(o.size);
  else if (cam && cam->size) size = cam->size;
  std::optional<double> cap = o.fov_cap;
  if (!cap && cam && cam->fov_cap_deg) cap = cam->fov_cap_deg;

  if (preset.empty() && model.empty() && cam) {
    if (cam->preset) preset = *cam->preset;
  }
  if (!preset.empty()) {
    const CameraPreset& p = builtin_presets().at(preset);
    const ImageSize out = size.value_or(p.output);
    CameraModel m = p.model;
    if (out != p.output) {
      ModelSpec spec = ModelSpec::from_model(p.model, false);
      spec.f *= static_cast<double>(out.width) / p.output.width;
      m = spec.resolve(out);
    }
    return {m, out, cap ? cap : p.fov_cap_deg, preset};
  }
  std::optional<ModelSpec> spec;
  if (!model.empty()) spec = parse_model_spec(model);
  else if (cam && cam->model) spec = cam->model;
  if (!spec) throw InvalidParameters("a camera is required: pass --preset or --model");
  const ImageSize out = size.value_or(kDefaultFisheyeSize);
  return {spec->resolve(out), out, cap, model.empty() ? "config model" : model};
}

std::optional<double> cap_rad(const std::optional<double>& deg) {
  return deg ? std::optional<double>(deg_to_rad(*deg)) : std::nullopt;
}

std::string outcome_text(const TableCache& c) {
  switch (c.last_outcome()) {
    case TableCache::Outcome::kHit: return "hit";
    case TableCache::Outcome::kMiss: return "miss";
    case TableCache::Outcome::kRebuiltCorrupt: return "rebuilt (corrupt entry)";
  }
  return "miss";
}

std::string cache_dir_of(const Options& o, const std::optional<RunConfig>& cfg) {
  if (!o.cache.empty()) return o.cache;
  if (cfg && cfg->cache_dir) return *cfg->cache_dir;
  return {};
}

fs::path output_path(const Options& o, const std::optional<RunConfig>& cfg, const char* fallback) {
  if (!o.out.empty()) return o.out;
  if (cfg && cfg->output_dir) return fs::path(*cfg->output_dir) / fallback;
  throw InvalidParameters("--out is required");
}

// ---------------------------------------------------------------------------

int cmd_render(const Options& o) {
  const auto cfg = maybe_config(o);
  const ResolvedCamera cam = resolve_camera(o, cfg);
  const SamplerConfig sampler = sampler_from(o.interp);
  const std::string cache_path = cache_dir_of(o, cfg);
  std::optional<TableCache> cache;
  if (!cache_path.empty()) cache.emplace(cache_path);
  TableCache* cp = cache ? &*cache : nullptr;

  std::string cubemap = o.cubemap, equirect = o.equirect;
  if (cubemap.empty() && equirect.empty() && cfg) {
    if (cfg->input.kind == InputSpec::Kind::kCubemap) cubemap = cfg->input.path;
    else if (cfg->input.kind == InputSpec::Kind::kEquirect) equirect = cfg->input.path;
  }
  if (cubemap.empty() == equirect.empty()) {
    throw InvalidParameters("render needs exactly one of --cubemap or --equirect");
  }
  RasterImage img;
  if (!cubemap.empty()) {
    const CubemapFaces faces = load_cubemap(cubemap);
    const RemapTable t = fisheye_from_cubemap_table(cam.model, cam.size, faces.face_size(),
                                                    cap_rad(cam.fov_cap_deg), cp);
    img = apply(t, faces.span(), sampler, o.threads);
  } else {
    const EquirectImage pano(read_png(equirect));
    const RemapTable t = fisheye_from_equirect_table(cam.model, cam.size, pano.size(),
                                                     cap_rad(cam.fov_cap_deg), cp);
    img = apply(t, pano.image(), sampler, o.threads);
  }
  const fs::path out = output_path(o, cfg, "render.png");
  write_png(out, img);
  std::cout << "wrote " << out.string() << " (" << to_string(img.size()) << ", " << cam.label << ")";
  if (cache) std::cout << "; cache " << outcome_text(*cache);
  std::cout << "\n";
  return 0;
}

int cmd_panorama(const Options& o) {
  const auto cfg = maybe_config(o);
  std::string cubemap = o.cubemap;
  if (cubemap.empty() && cfg && cfg->input.kind == InputSpec::Kind::kCubemap) cubemap = cfg->input.path;
  if (cubemap.empty()) throw InvalidParameters("--cubemap is required");
  ImageSize fisheye = kDefaultFisheyeSize;
  if (!o.size.empty()) fisheye = parse_size(o.size);
  else if (!o.preset.empty()) fisheye = builtin_presets().at(o.preset).output;
  else if (cfg && cfg->camera && cfg->camera->size) fisheye = *cfg->camera->size;
  else if (cfg && cfg->camera && cfg->camera->preset) fisheye = builtin_presets().at(*cfg->camera->preset).output;
  ImageSize dst = default_equirect_size(fisheye);
  if (o.width) {
    if (*o.width < 2 || *o.width % 2 != 0) {
      throw AspectError("panorama width must be even so that width = 2 x height, got " +
                        std::to_string(*o.width));
    }
    dst = {*o.width, *o.width / 2};
  }
  const std::string cache_path = cache_dir_of(o, cfg);
  std::optional<TableCache> cache;
  if (!cache_path.empty()) cache.emplace(cache_path);
  const CubemapFaces faces = load_cubemap(cubemap);
  const RemapTable t = equirect_from_cubemap_table(dst, faces.face_size(), cache ? &*cache : nullptr);
  const RasterImage img = apply(t, faces.span(), sampler_from(o.interp), o.threads);
  const fs::path out = output_path(o, cfg, "panorama.png");
  write_png(out, img);
  std::cout << "wrote " << out.string() << " (" << to_string(img.size()) << ")";
  if (cache) std::cout << "; cache " << outcome_text(*cache);
  std::cout << "\n";
  return 0;
}

std::vector<fs::path> collect_inputs(const std::string& in, const std::optional<RunConfig>& cfg) {
  std::vector<fs::path> files;
  if (in.empty()) {
    if (cfg && cfg->input.kind == InputSpec::Kind::kImages) {
      for (const auto& s : cfg->input.images) files.emplace_back(s);
    } else {
      throw InvalidParameters("--in is required");
    }
  } else if (fs::is_directory(in)) {
    for (const auto& e : fs::directory_iterator(in)) {
      if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    if (files.empty()) throw IoError("no .png files in " + in);
  } else {
    if (!fs::exists(in)) throw IoError("input " + in + " does not exist");
    files.emplace_back(in);
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

int cmd_augment(const Options& o) {
  const auto cfg = maybe_config(o);
  const AugmentSpec aug = cfg ? cfg->augmentation : AugmentSpec{};
  std::string mode = o.mode;
  if (mode.empty()) {
    if (aug.mode == AugmentMode::kRsa) mode = "rsa";
    else if (aug.mode == AugmentMode::kFixed) mode = "fixed";
    else throw InvalidParameters("--mode is required (rsa or fixed)");
  }
  if (mode != "rsa" && mode != "fixed") throw InvalidParameters("--mode must be rsa or fixed, got '" + mode + "'");
  RsaConfig rsa;
  rsa.s_lo = o.s_lo.value_or(aug.s_lo.value_or(rsa.s_lo));
  rsa.s_hi = o.s_hi.value_or(aug.s_hi.value_or(rsa.s_hi));
  rsa.seed = o.seed.value_or(cfg && cfg->seed ? *cfg->seed : 0);
  const double fixed_scale = o.scale.value_or(aug.scale.value_or(0.95));
  if (mode == "rsa") {
    rsa.validate();
  } else if (!(fixed_scale > 0.0 && fixed_scale <= 1.0)) {
    throw InvalidParameters("fixed crop scale must lie in (0, 1], got " + exact_double(fixed_scale));
  }
  std::optional<ImageSize> target;
  if (!o.target.empty()) target = parse_size(o.target);
  else if (aug.target) target = aug.target;

  const std::vector<fs::path> files = collect_inputs(o.in, cfg);
  fs::path out_dir = o.out;
  if (out_dir.empty() && cfg && cfg->output_dir) out_dir = *cfg->output_dir;
  if (out_dir.empty()) throw InvalidParameters("--out is required");
  fs::create_directories(out_dir);

  std::vector<double> used(files.size(), 0.0);
  parallel_for(static_cast<int>(files.size()), o.threads, [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      const RasterImage img = read_png(files[k]);
      const ImageSize tgt = target.value_or(img.size());
      RasterImage result;
      if (mode == "rsa") {
        ScaleStream stream(rsa.seed, static_cast<std::uint64_t>(k));
        RsaConfig c = rsa;
        c.target = tgt;
        RsaResult r = rsa_apply(img, c, stream);
        used[k] = r.scale;
        result = std::move(r.image);
      } else {
        used[k] = fixed_scale;
        result = fixed_crop(img, fixed_scale, tgt);
      }
      write_png(out_dir / files[k].filename(), result);
    }
  });

  std::string log = "file\tscale\n";
  for (std::size_t k = 0; k < files.size(); ++k) {
    log += files[k].filename().string() + "\t" + exact_double(used[k]) + "\n";
  }
  write_file_atomic(out_dir / "scales.tsv",
                    std::span(reinterpret_cast<const std::uint8_t*>(log.data()), log.size()));
  std::cout << "augmented " << files.size() << " image(s) into " << out_dir.string() << " (mode " << mode;
  if (mode == "rsa") std::cout << ", s in [" << rsa.s_lo << ", " << rsa.s_hi << "], seed " << rsa.seed;
  else std::cout << ", scale " << fixed_scale;
  std::cout << ")\n";
  return 0;
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw InvalidParameters("invalid scale '" + item + "' in --scales");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

// "0.7" -> "0.70"; finer values keep every digit.
std::string scale_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", s);
  return std::strtod(buf, nullptr) == s ? std::string(buf) : exact_double(s);
}

int cmd_sweep(const Options& o) {
  const auto cfg = maybe_config(o);
  SweepSpec spec;
  if (!o.scales.empty()) spec.scales = parse_scales(o.scales);
  else if (cfg && cfg->augmentation.scales) spec.scales = *cfg->augmentation.scales;
  const std::vector<fs::path> files = collect_inputs(o.in, cfg);
  if (files.size() != 1) throw InvalidParameters("sweep takes a single input image");
  const RasterImage img = read_png(files[0]);
  if (!o.target.empty()) spec.target = parse_size(o.target);
  else if (cfg && cfg->augmentation.target) spec.target = *cfg->augmentation.target;
  else spec.target = img.size();
  const std::vector<RasterImage> outs = scale_sweep(img, spec);
  fs::path out_dir = o.out;
  if (out_dir.empty() && cfg && cfg->output_dir) out_dir = *cfg->output_dir;
  if (out_dir.empty()) throw InvalidParameters("--out is required");
  const std::string stem = files[0].stem().string();
  for (std::size_t k = 0; k < outs.size(); ++k) {
    const fs::path p = out_dir / (stem + "_S" + scale_label(spec.scales[k]) + ".png");
    write_png(p, outs[k]);
    std::cout << p.string() << "\n";
  }
  return 0;
}

json model_json(const CameraModel& m) {
  const ModelSpec s = ModelSpec::from_model(m);
  json j;
  j["family"] = std::string(family_name(s.family));
  j["f"] = s.f;
  if (s.family != Family::kPinhole) j["alpha"] = s.alpha;
  if (s.family == Family::kEucm) j["beta"] = s.beta;
  if (s.family == Family::kDs) j["xi"] = s.xi;
  j["scale"] = s.scale;
  j["cx"] = *s.cx;
  j["cy"] = *s.cy;
  return j;
}

// Shortest exact decimal, with ".0" on whole numbers.
std::string decimal(double v) {
  std::string t = exact_double(v);
  if (t.find_first_of(".e") == std::string::npos) t += ".0";
  return t;
}

std::string model_text(const CameraModel& m) {
  const ModelSpec s = ModelSpec::from_model(m);
  std::string t = std::string(family_name(s.family)) + " f=" + decimal(s.f);
  if (s.family != Family::kPinhole) t += " a_=" + decimal(s.alpha);
  if (s.family == Family::kEucm) t += " b_=" + decimal(s.beta);
  if (s.family == Family::kDs) t += " xi=" + decimal(s.xi);
  t += " scale=" + decimal(s.scale);
  return t;
}

json preset_json(const CameraPreset& p) {
  json j;
  j["name"] = p.name;
  j["profile"] = std::string(profile_name(p.profile));
  j["size"] = to_string(p.output);
  j["model"] = model_json(p.model);
  j["nominal_fov_deg"] = p.nominal_fov_deg ? json(*p.nominal_fov_deg) : json(nullptr);
  j["fov_cap_deg"] = p.fov_cap_deg ? json(*p.fov_cap_deg) : json(nullptr);
  j["note"] = p.note;
  return j;
}

int cmd_presets(const Options& o, const std::string& action) {
  const PresetRegistry& reg = builtin_presets();
  if (action == "list") {
    if (o.json) {
      json arr = json::array();
      for (const auto& p : reg.all()) arr.push_back(preset_json(p));
      std::cout << arr.dump(2) << "\n";
    } else {
      for (const auto& p : reg.all()) {
        std::printf("%-18s %-4s %-9s %s\n", p.name.c_str(), std::string(profile_name(p.profile)).c_str(),
                    to_string(p.output).c_str(), model_text(p.model).c_str());
      }
    }
  } else if (action == "show") {
    const CameraPreset& p = reg.at(o.name);
    if (o.json) {
      std::cout << preset_json(p).dump(2) << "\n";
    } else {
      std::cout << p.name << "\n  " << model_text(p.model) << "\n  size " << to_string(p.output)
                << "\n  profile " << profile_name(p.profile) << "\n";
      if (p.nominal_fov_deg) std::cout << "  nominal FoV " << *p.nominal_fov_deg << " deg\n";
      if (p.fov_cap_deg) std::cout << "  FoV cap " << *p.fov_cap_deg << " deg\n";
      if (!p.note.empty()) std::cout << "  " << p.note << "\n";
    }
  } else {
    const std::string text = format_presets(reg);
    if (o.out.empty()) {
      std::cout << text;
    } else {
      write_file_atomic(o.out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
      std::cout << "wrote " << o.out << "\n";
    }
  }
  return 0;
}

int cmd_inspect(const Options& o) {
  const auto cfg = maybe_config(o);
  const ResolvedCamera cam = resolve_camera(o, cfg);
  const FovReport r = fov_report(cam.model, cam.size);
  const double domain = 2.0 * rad_to_deg(max_valid_angle(cam.model));
  const std::optional<double> circle = image_circle_radius(cam.model);
  if (o.json) {
    json j;
    j["camera"] = cam.label;
    j["size"] = to_string(cam.size);
    j["model"] = model_json(cam.model);
    j["effective_focal"] = cam.model.effective_focal();
    j["horizontal_fov_deg"] = rad_to_deg(2.0 * r.horizontal_half);
    j["diagonal_fov_deg"] = rad_to_deg(2.0 * r.diagonal_half);
    j["domain_fov_deg"] = domain;
    j["image_circle_radius_px"] = circle ? json(*circle) : json(nullptr);
    j["fov_cap_deg"] = cam.fov_cap_deg ? json(*cam.fov_cap_deg) : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("camera        %s\n", cam.label.c_str());
  std::printf("model         %s\n", model_text(cam.model).c_str());
  std::printf("size          %s\n", to_string(cam.size).c_str());
  std::printf("horizontal    %.3f deg\n", rad_to_deg(2.0 * r.horizontal_half));
  std::printf("diagonal      %.3f deg\n", rad_to_deg(2.0 * r.diagonal_half));
  std::printf("model domain  %.3f deg\n", domain);
  if (circle) std::printf("image circle  %.3f px\n", *circle);
  else std::printf("image circle  none (every pixel maps to a ray)\n");
  if (cam.fov_cap_deg) std::printf("FoV cap       %.3f deg\n", *cam.fov_cap_deg);
  return 0;
}

int cmd_cache(const Options& o, const std::string& action) {
  const fs::path dir = o.cache_dir;
  if (!fs::is_directory(dir)) {
    if (action == "clear") return 0;
    throw IoError("cache directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".fsrt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (action == "clear") {
    for (const auto& f : files) fs::remove(f);
    std::cout << "removed " << files.size() << " table(s)\n";
    return 0;
  }
  int bad = 0;
  for (const auto& f : files) {
    try {
      const LoadedTable lt = load_table(f);
      if (action == "verify") {
        check_table(lt.table);
        std::cout << "ok       " << f.filename().string() << "\n";
      } else {
        std::cout << f.filename().string() << "  " << fs::file_size(f) << " bytes  " << lt.recipe << "\n";
      }
    } catch (const Error& e) {
      ++bad;
      std::cout << "corrupt  " << f.filename().string() << ": " << e.what() << "\n";
    }
  }
  if (action == "verify") std::cout << files.size() - bad << " ok, " << bad << " corrupt\n";
  return bad ? 2 : 0;
}

int exit_code(Error::Category c) {
  switch (c) {
    case Error::Category::kValidation: return 1;
    case Error::Category::kIo: return 2;
    case Error::Category::kInternal: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisheye camera simulation: cubemap rendering, panoramas and scale augmentation"};
  app.require_subcommand(1);
  Options o;

  auto add_camera = [&](CLI::App* c) {
    c->add_option("--preset", o.preset, "Built-in camera preset");
    c->add_option("--model", o.model, "Inline model, e.g. eucm:f=45,alpha=0.4,beta=2.0,scale=0.9");
    c->add_option("--size", o.size, "Output size WxH");
  };
  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", o.config, "YAML run configuration; flags win over file values");
  };

  auto* render = app.add_subcommand("render", "Render a lens image from a cubemap or panorama");
  render->add_option("--cubemap", o.cubemap, "Directory with front/back/left/right/up/down.png");
  render->add_option("--equirect", o.equirect, "2:1 equirectangular PNG");
  add_camera(render);
  render->add_option("--out", o.out, "Output PNG");
  render->add_option("--fov-cap", o.fov_cap, "Angular FoV cap in degrees");
  render->add_option("--cache", o.cache, "Remap table cache directory");
  render->add_option("--interp", o.interp, "nearest or bilinear");
  render->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  add_config(render);

  auto* pano = app.add_subcommand("panorama", "Build the equirectangular panorama of a cubemap");
  pano->add_option("--cubemap", o.cubemap, "Cubemap directory");
  pano->add_option("--out", o.out, "Output PNG");
  pano->add_option("--width", o.width, "Panorama width (even); default 4x the fisheye width");
  pano->add_option("--size", o.size, "Fisheye size the default width derives from");
  pano->add_option("--preset", o.preset, "Preset whose size the default width derives from");
  pano->add_option("--cache", o.cache, "Remap table cache directory");
  pano->add_option("--interp", o.interp, "nearest or bilinear");
  pano->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  add_config(pano);

  auto* augment = app.add_subcommand("augment", "Random scale augmentation or fixed crop");
  augment->add_option("--in", o.in, "Input PNG or directory of PNGs");
  augment->add_option("--mode", o.mode, "rsa or fixed");
  augment->add_option("--s-lo", o.s_lo, "Lower scale bound (rsa)");
  augment->add_option("--s-hi", o.s_hi, "Upper scale bound (rsa)");
  augment->add_option("--scale", o.scale, "Crop scale (fixed), default 0.95");
  augment->add_option("--target", o.target, "Output size WxH; default input size");
  augment->add_option("--seed", o.seed, "Random seed");
  augment->add_option("--out", o.out, "Output directory");
  augment->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  add_config(augment);

  auto* sweep = app.add_subcommand("sweep", "Centre-scale an image at a list of factors");
  sweep->add_option("--in", o.in, "Input PNG");
  sweep->add_option("--scales", o.scales, "Comma-separated factors (default 0.70,0.85,1.00,1.15,1.30)");
  sweep->add_option("--target", o.target, "Output size WxH; default input size");
  sweep->add_option("--out", o.out, "Output directory");
  add_config(sweep);

  auto* presets = app.add_subcommand("presets", "List, show or export camera presets");
  presets->require_subcommand(1);
  auto* plist = presets->add_subcommand("list", "List presets");
  plist->add_flag("--json", o.json, "Machine-readable output");
  auto* pshow = presets->add_subcommand("show", "Show one preset");
  pshow->add_option("name", o.name, "Preset name")->required();
  pshow->add_flag("--json", o.json, "Machine-readable output");
  auto* pexport = presets->add_subcommand("export", "Write the registry as YAML");
  pexport->add_option("--out", o.out, "Output file (stdout if omitted)");

  auto* inspect = app.add_subcommand("inspect", "Report a camera's field of view");
  add_camera(inspect);
  inspect->add_option("--fov-cap", o.fov_cap, "Angular FoV cap in degrees");
  inspect->add_flag("--json", o.json, "Machine-readable output");
  add_config(inspect);

  auto* cache = app.add_subcommand("cache", "Manage the remap table cache");
  cache->require_subcommand(1);
  for (const char* action : {"list", "verify", "clear"}) {
    auto* c = cache->add_subcommand(action, std::string(action) + " cached tables");
    c->add_option("--dir", o.cache_dir, "Cache directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*render) return cmd_render(o);
    if (*pano) return cmd_panorama(o);
    if (*augment) return cmd_augment(o);
    if (*sweep) return cmd_sweep(o);
    if (*presets) {
      for (auto* sc : presets->get_subcommands()) return cmd_presets(o, sc->get_name());
    }
    if (*inspect) return cmd_inspect(o);
    if (*cache) {
      for (auto* sc : cache->get_subcommands()) return cmd_cache(o, sc->get_name());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
