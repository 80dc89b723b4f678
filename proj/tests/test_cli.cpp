// Drives the built command-line tool as a subprocess.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fisheyesim/augment.hpp"
#include "fisheyesim/config.hpp"
#include "fisheyesim/png_io.hpp"
#include "support.hpp"

using namespace fisheyesim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string output;
};

CliResult cli(const std::string& args) {
  const std::string cmd = std::string(FISHEYESIM_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Sorted (relative path, bytes) listing of a directory tree.
std::vector<std::pair<std::string, std::vector<std::uint8_t>>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), testsupport::file_bytes(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testsupport::scratch_dir("cli"); }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(Cli, PresetsShowPrintsLensTableRow) {
  const CliResult r = cli("presets show seen_param");
  EXPECT_EQ(r.code, 0) << r.output;
  for (const char* s : {"f=45", "a_=0.4", "b_=2.0", "scale=0.9"}) EXPECT_NE(r.output.find(s), std::string::npos) << s;
  const CliResult list = cli("presets list --json");
  ASSERT_EQ(list.code, 0);
  EXPECT_EQ(nlohmann::json::parse(list.output).size(), 10u);
}

TEST_F(Cli, PresetsExportParsesBack) {
  ASSERT_EQ(cli("presets export --out " + q(dir_ / "p.yaml")).code, 0);
  const auto bytes = testsupport::file_bytes(dir_ / "p.yaml");
  const PresetRegistry back = parse_presets(std::string(bytes.begin(), bytes.end()));
  EXPECT_EQ(back.names(), builtin_presets().names());
  const std::string text(bytes.begin(), bytes.end());
  EXPECT_NE(text.find("sim_fisheye_235"), std::string::npos);
}

TEST_F(Cli, InspectReportsFittedFov) {
  const CliResult pin = cli("inspect --preset sim_pinhole_90 --json");
  ASSERT_EQ(pin.code, 0) << pin.output;
  EXPECT_NEAR(nlohmann::json::parse(pin.output)["horizontal_fov_deg"].get<double>(), 90.0, 0.05);
  const CliResult fish = cli("inspect --preset sim_fisheye_235 --json");
  ASSERT_EQ(fish.code, 0) << fish.output;
  EXPECT_NEAR(nlohmann::json::parse(fish.output)["horizontal_fov_deg"].get<double>(), 235.0, 0.1);
  const CliResult text = cli("inspect --preset seen_param");
  EXPECT_NE(text.output.find("horizontal"), std::string::npos);
}

TEST_F(Cli, RenderSolidCubemapAndReuseCache) {
  save_cubemap(dir_ / "cube", testsupport::solid_cubemap(32));
  const std::string args = "render --cubemap " + q(dir_ / "cube") + " --preset seen_param --cache " + q(dir_ / "cache");
  const CliResult first = cli(args + " --out " + q(dir_ / "a.png"));
  ASSERT_EQ(first.code, 0) << first.output;
  EXPECT_NE(first.output.find("cache miss"), std::string::npos) << first.output;
  const CliResult second = cli(args + " --out " + q(dir_ / "b.png"));
  ASSERT_EQ(second.code, 0) << second.output;
  EXPECT_NE(second.output.find("cache hit"), std::string::npos) << second.output;
  EXPECT_EQ(testsupport::file_bytes(dir_ / "a.png"), testsupport::file_bytes(dir_ / "b.png"));
  const RasterImage img = read_png(dir_ / "a.png");
  EXPECT_EQ(img.size(), (ImageSize{128, 128}));
  EXPECT_TRUE(std::equal(img.pixel(64, 64), img.pixel(64, 64) + 3, testsupport::kFaceColors[0].begin()));
}

TEST_F(Cli, RenderCappedLensHasBlackCorners) {
  save_cubemap(dir_ / "cube", testsupport::solid_cubemap(32));
  ASSERT_EQ(cli("render --cubemap " + q(dir_ / "cube") + " --preset sim_fisheye_235 --out " + q(dir_ / "f.png")).code, 0);
  const RasterImage img = read_png(dir_ / "f.png");
  EXPECT_EQ(img.pixel(0, 0)[0] + img.pixel(0, 0)[1] + img.pixel(0, 0)[2], 0);
  const CliResult inline_model =
      cli("render --cubemap " + q(dir_ / "cube") + " --model eucm:f=45,alpha=0.4,beta=2.0,scale=0.9 --out " +
          q(dir_ / "m.png"));
  ASSERT_EQ(inline_model.code, 0) << inline_model.output;
  ASSERT_EQ(cli("render --cubemap " + q(dir_ / "cube") + " --preset seen_param --out " + q(dir_ / "p.png")).code, 0);
  EXPECT_EQ(testsupport::file_bytes(dir_ / "m.png"), testsupport::file_bytes(dir_ / "p.png"));
}

TEST_F(Cli, RenderErrors) {
  save_cubemap(dir_ / "cube", testsupport::solid_cubemap(8));
  const CliResult unknown = cli("render --cubemap " + q(dir_ / "cube") + " --preset param9 --out " + q(dir_ / "x.png"));
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.output.find("seen_param"), std::string::npos) << unknown.output;
  fs::remove(dir_ / "cube" / "down.png");
  const CliResult missing = cli("render --cubemap " + q(dir_ / "cube") + " --preset param1 --out " + q(dir_ / "x.png"));
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("down"), std::string::npos) << missing.output;
  EXPECT_FALSE(fs::exists(dir_ / "x.png"));
}

TEST_F(Cli, PanoramaDefaultsAndAspect) {
  save_cubemap(dir_ / "cube", testsupport::noise_cubemap(16, 2));
  ASSERT_EQ(cli("panorama --cubemap " + q(dir_ / "cube") + " --out " + q(dir_ / "p.png")).code, 0);
  EXPECT_EQ(read_png(dir_ / "p.png").size(), (ImageSize{512, 256}));
  ASSERT_EQ(cli("panorama --cubemap " + q(dir_ / "cube") + " --preset real_fisheye_180 --out " + q(dir_ / "r.png")).code, 0);
  EXPECT_EQ(read_png(dir_ / "r.png").size(), (ImageSize{896, 448}));
  EXPECT_EQ(cli("panorama --cubemap " + q(dir_ / "cube") + " --width 1023 --out " + q(dir_ / "o.png")).code, 1);
}

TEST_F(Cli, PanoramaShiftsWithYawRotation) {
  const CubemapFaces faces = testsupport::noise_cubemap(24, 6);
  save_cubemap(dir_ / "a", faces);
  save_cubemap(dir_ / "b", rotate_yaw_quarter(faces));
  for (const char* d : {"a", "b"}) {
    ASSERT_EQ(cli("panorama --interp nearest --width 256 --cubemap " + q(dir_ / d) + " --out " +
                  q(dir_ / (std::string(d) + ".png"))).code, 0);
  }
  const RasterImage a = read_png(dir_ / "a.png"), b = read_png(dir_ / "b.png");
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 256; ++x) {
      ASSERT_TRUE(std::equal(a.pixel(x, y), a.pixel(x, y) + 3, b.pixel((x + 64) % 256, y))) << x << "," << y;
    }
  }
}

TEST_F(Cli, AugmentFixedMatchesLibrary) {
  const RasterImage img = testsupport::noise({128, 128}, 3, 31);
  write_png(dir_ / "in.png", img);
  ASSERT_EQ(cli("augment --in " + q(dir_ / "in.png") + " --mode fixed --scale 0.95 --out " + q(dir_ / "o")).code, 0);
  EXPECT_EQ(read_png(dir_ / "o" / "in.png"), fixed_crop(img, 0.95, {128, 128}));
}

TEST_F(Cli, AugmentRsaIsSeededAndOrderIndependent) {
  for (int k = 0; k < 5; ++k) write_png(dir_ / "in" / ("img" + std::to_string(k) + ".png"), testsupport::noise({48, 48}, 3, k));
  const std::string base = "augment --in " + q(dir_ / "in") + " --mode rsa --seed 7 --target 32x32 --out ";
  ASSERT_EQ(cli(base + q(dir_ / "o1") + " --threads 1").code, 0);
  ASSERT_EQ(cli(base + q(dir_ / "o2") + " --threads 4").code, 0);
  EXPECT_EQ(tree(dir_ / "o1"), tree(dir_ / "o2"));
  ASSERT_EQ(cli("augment --in " + q(dir_ / "in") + " --mode rsa --seed 8 --target 32x32 --out " + q(dir_ / "o3")).code, 0);
  EXPECT_NE(tree(dir_ / "o1"), tree(dir_ / "o3"));

  // File k uses stream k of the seed.
  ScaleStream s(7, 2);
  RsaConfig cfg;
  cfg.target = {32, 32};
  cfg.seed = 7;
  const RsaResult expected = rsa_apply(read_png(dir_ / "in" / "img2.png"), cfg, s);
  EXPECT_EQ(read_png(dir_ / "o1" / "img2.png"), expected.image);
  const auto log = testsupport::file_bytes(dir_ / "o1" / "scales.tsv");
  EXPECT_NE(std::string(log.begin(), log.end()).find("img2.png\t" + exact_double(expected.scale)), std::string::npos);
}

TEST_F(Cli, AugmentRejectsBadArguments) {
  write_png(dir_ / "in.png", testsupport::noise({16, 16}, 3, 1));
  EXPECT_EQ(cli("augment --in " + q(dir_ / "in.png") + " --mode rsa --s-lo 1.3 --s-hi 0.7 --out " + q(dir_ / "o")).code, 1);
  EXPECT_EQ(cli("augment --in " + q(dir_ / "in.png") + " --mode fixed --scale 1.2 --out " + q(dir_ / "o")).code, 1);
  EXPECT_EQ(cli("augment --in " + q(dir_ / "in.png") + " --mode zoom --out " + q(dir_ / "o")).code, 1);
  EXPECT_EQ(cli("augment --in " + q(dir_ / "missing.png") + " --mode rsa --out " + q(dir_ / "o")).code, 2);
}

TEST_F(Cli, SweepWritesOneFilePerScale) {
  const RasterImage img = testsupport::noise({64, 64}, 3, 77);
  write_png(dir_ / "view.png", img);
  const CliResult r = cli("sweep --in " + q(dir_ / "view.png") + " --out " + q(dir_ / "s"));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* s : {"0.70", "0.85", "1.00", "1.15", "1.30"}) {
    EXPECT_TRUE(fs::exists(dir_ / "s" / ("view_S" + std::string(s) + ".png"))) << s;
  }
  EXPECT_EQ(read_png(dir_ / "s" / "view_S1.00.png"), img);
  EXPECT_EQ(cli("sweep --in " + q(dir_ / "view.png") + " --scales 0.5,x --out " + q(dir_ / "s")).code, 1);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  save_cubemap(dir_ / "cube", testsupport::solid_cubemap(16));
  std::ofstream(dir_ / "run.yaml") << "input:\n  cubemap: " << (dir_ / "cube").string()
                                   << "\ncamera:\n  preset: param1\n  size: 64x64\noutput_dir: " << dir_.string() << "\n";
  ASSERT_EQ(cli("render --config " + q(dir_ / "run.yaml")).code, 0);
  EXPECT_EQ(read_png(dir_ / "render.png").size(), (ImageSize{64, 64}));
  ASSERT_EQ(cli("render --config " + q(dir_ / "run.yaml") + " --size 32x32 --out " + q(dir_ / "small.png")).code, 0);
  EXPECT_EQ(read_png(dir_ / "small.png").size(), (ImageSize{32, 32}));

  std::ofstream(dir_ / "bad.yaml") << "input:\n  cubemap: x\ncamera:\n  preset: param1\n  focal_lenght: 3\n";
  const CliResult bad = cli("render --config " + q(dir_ / "bad.yaml"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.output.find("focal_lenght"), std::string::npos);
  EXPECT_NE(bad.output.find("line 5"), std::string::npos);
}

TEST_F(Cli, CacheCommands) {
  save_cubemap(dir_ / "cube", testsupport::solid_cubemap(8));
  ASSERT_EQ(cli("render --cubemap " + q(dir_ / "cube") + " --preset param2 --cache " + q(dir_ / "c") + " --out " + q(dir_ / "x.png")).code, 0);
  const CliResult list = cli("cache list --dir " + q(dir_ / "c"));
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.output.find("family=ds"), std::string::npos) << list.output;
  EXPECT_EQ(cli("cache verify --dir " + q(dir_ / "c")).code, 0);
  for (const auto& e : fs::directory_iterator(dir_ / "c")) std::ofstream(e.path(), std::ios::app) << "junk";
  EXPECT_EQ(cli("cache verify --dir " + q(dir_ / "c")).code, 2);
  EXPECT_EQ(cli("cache clear --dir " + q(dir_ / "c")).code, 0);
  EXPECT_TRUE(fs::is_empty(dir_ / "c"));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("inspect --preset seen_param --size 12by3").code, 1);
  EXPECT_EQ(cli("inspect").code, 1);
  EXPECT_EQ(cli("presets show nothing").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}
