// Builds a labelled synthetic cubemap, renders it through a few presets and
// writes the results next to the executable (or into argv[1]).

#include <cstdio>
#include <filesystem>

#include "fisheyesim/augment.hpp"
#include "fisheyesim/pipeline.hpp"
#include "fisheyesim/png_io.hpp"
#include "fisheyesim/presets.hpp"

using namespace fisheyesim;

namespace {

// Each face gets its own base colour plus a checkerboard, so seams and
// orientation are easy to see.
CubemapFaces checker_cubemap(int n) {
  constexpr std::array<std::array<std::uint8_t, 3>, 6> base = {{
      {220, 60, 60}, {60, 60, 220}, {60, 200, 60}, {220, 200, 60}, {200, 200, 200}, {120, 70, 30}}};
  std::array<RasterImage, 6> faces;
  for (Face f : kAllFaces) {
    RasterImage img({n, n}, 3);
    const auto& c = base[face_index(f)];
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const bool dark = ((x * 8 / n) + (y * 8 / n)) % 2 == 0;
        std::uint8_t* p = img.pixel(x, y);
        for (int k = 0; k < 3; ++k) p[k] = dark ? c[k] / 2 : c[k];
      }
    }
    faces[face_index(f)] = std::move(img);
  }
  return CubemapFaces(std::move(faces));
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "render_demo_out";
  const CubemapFaces faces = checker_cubemap(256);
  save_cubemap(out / "cubemap", faces);
  write_png(out / "panorama.png", cubemap_to_equirect(faces, {1024, 512}).image());

  for (const char* name : {"seen_param", "param2", "sim_fisheye_235", "sim_pinhole_90"}) {
    const CameraPreset& p = builtin_presets().at(name);
    const RasterImage img = render_fisheye(faces, p.model, p.output, {}, p.fov_cap_rad());
    write_png(out / (std::string(name) + ".png"), img);
    std::printf("%-16s -> %s\n", name, (out / (std::string(name) + ".png")).string().c_str());
  }

  const RasterImage lens = render_fisheye(faces, builtin_presets().at("seen_param").model, kSimResolution);
  ScaleStream stream(7);
  for (int k = 0; k < 3; ++k) {
    const RsaResult r = rsa_apply(lens, RsaConfig{}, stream);
    char file[64];
    std::snprintf(file, sizeof file, "rsa_%d_s%.3f.png", k, r.scale);
    write_png(out / file, r.image);
  }
  return 0;
}
