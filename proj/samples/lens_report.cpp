// Prints the field of view of every built-in preset.

#include <cstdio>

#include "fisheyesim/presets.hpp"

int main() {
  using namespace fisheyesim;
  std::printf("%-18s %-8s %9s %9s %9s\n", "preset", "size", "horiz", "diag", "domain");
  for (const CameraPreset& p : builtin_presets().all()) {
    const FovReport r = fov_report(p.model, p.output);
    std::printf("%-18s %-8s %8.2f° %8.2f° %8.2f°\n", p.name.c_str(), to_string(p.output).c_str(),
                rad_to_deg(2 * r.horizontal_half), rad_to_deg(2 * r.diagonal_half),
                rad_to_deg(2 * max_valid_angle(p.model)));
  }
}
