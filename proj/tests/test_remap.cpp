#include <gtest/gtest.h>

#include <random>

#include "fisheyesim/presets.hpp"
#include "fisheyesim/remap.hpp"
#include "support.hpp"

using namespace fisheyesim;
using testsupport::kAxes;

namespace {

// Direction of a cubemap sample-space coordinate, from the longhand axes.
std::array<double, 3> face_dir(int face, double x, double y, int n) {
  const double a = 2.0 * (x + 0.5) / n - 1.0, b = 2.0 * (y + 0.5) / n - 1.0;
  std::array<double, 3> d{};
  for (int k = 0; k < 3; ++k) d[k] = kAxes[face][0][k] + a * kAxes[face][1][k] + b * kAxes[face][2][k];
  return d;
}

}  // namespace

TEST(EquirectTable, MatchesBruteForceRecompute) {
  const ImageSize dst{256, 128};
  const int n = 64;
  const RemapTable t = build_equirect_from_cubemap(dst, n);
  ASSERT_EQ(t.valid_count(), dst.area());
  check_table(t);
  for (int j = 0; j < dst.height; ++j) {
    for (int i = 0; i < dst.width; ++i) {
      const double lon = ((i + 0.5) / dst.width - 0.5) * 2.0 * kPi;
      const double lat = (0.5 - (j + 0.5) / dst.height) * kPi;
      const auto ref = testsupport::ref_cubeface(std::cos(lat) * std::sin(lon), -std::sin(lat),
                                                 std::cos(lat) * std::cos(lon));
      const std::size_t k = static_cast<std::size_t>(j) * dst.width + i;
      ASSERT_EQ(t.faces[k], ref.face) << i << "," << j;
      ASSERT_NEAR(t.x(k), ref.u * n - 0.5, 1e-3);
      ASSERT_NEAR(t.y(k), ref.v * n - 0.5, 1e-3);
    }
  }
}

TEST(EquirectTable, RejectsWrongAspect) {
  EXPECT_THROW(build_equirect_from_cubemap({300, 100}, 32), AspectError);
  EXPECT_THROW(build_fisheye_from_equirect(builtin_presets().at("seen_param").model, {128, 128}, {301, 150}),
               AspectError);
}

TEST(FisheyeTable, EntriesReprojectToPixelCentres) {
  // Each valid entry's direction, pushed back through a long-double EUCM
  // projection, must land on its own destination pixel centre.
  for (const char* name : {"seen_param", "param4", "sim_fisheye_235"}) {
    const CameraPreset& p = builtin_presets().at(name);
    const auto& k = std::get<EucmParams>(p.model.params());
    const int n = 256;
    const RemapTable t = build_fisheye_from_cubemap(p.model, p.output, n, p.fov_cap_rad());
    check_table(t);
    for (int j = 0; j < p.output.height; ++j) {
      for (int i = 0; i < p.output.width; ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * p.output.width + i;
        if (!t.valid_at(idx)) continue;
        const auto d = face_dir(t.faces[idx], t.x(idx), t.y(idx), n);
        long double u, v;
        ASSERT_TRUE(testsupport::ref_eucm(k.f * p.model.output_scale(), k.alpha, k.beta, k.cx, k.cy, d[0], d[1],
                                          d[2], u, v));
        ASSERT_NEAR(static_cast<double>(u), i + 0.5, 2e-3) << name;
        ASSERT_NEAR(static_cast<double>(v), j + 0.5, 2e-3) << name;
      }
    }
  }
}

TEST(FisheyeTable, SeenParamMaskIsWholeImage) {
  // alpha = 0.4 leaves no image circle: every 128x128 pixel is valid.
  const CameraPreset& p = builtin_presets().at("seen_param");
  EXPECT_EQ(build_fisheye_from_cubemap(p.model, p.output, 64).valid_count(), 128u * 128u);
}

TEST(FisheyeTable, CapMasksByOffAxisAngle) {
  const CameraPreset& p = builtin_presets().at("sim_fisheye_235");
  const RemapTable t = build_fisheye_from_cubemap(p.model, p.output, 64, p.fov_cap_rad());
  const double half = deg_to_rad(117.5);
  for (int j = 0; j < 128; ++j) {
    for (int i = 0; i < 128; ++i) {
      const UnprojResult r = unproject(p.model, i + 0.5, j + 0.5);
      ASSERT_TRUE(r.valid);
      const double off = std::acos(std::clamp(r.dir.z, -1.0, 1.0));
      if (std::abs(off - half) < 1e-6) continue;
      EXPECT_EQ(t.valid_at(static_cast<std::size_t>(j) * 128 + i), off < half) << i << "," << j;
    }
  }
}

TEST(FisheyeTable, CapBeyondDomainIsRejected) {
  const CameraModel& m = builtin_presets().at("sim_pinhole_90").model;
  EXPECT_THROW(build_fisheye_from_cubemap(m, {128, 128}, 64, deg_to_rad(200.0)), UnachievableFov);
  EXPECT_THROW(build_fisheye_from_cubemap(m, {128, 128}, 64, -1.0), InvalidParameters);
}

TEST(FisheyeTable, ThreadCountDoesNotChangeTable) {
  const CameraModel& m = builtin_presets().at("param2").model;
  const RemapTable a = build_fisheye_from_equirect(m, {128, 128}, {512, 256}, std::nullopt, 1);
  const RemapTable b = build_fisheye_from_equirect(m, {128, 128}, {512, 256}, std::nullopt, 7);
  EXPECT_EQ(a, b);
}

TEST(CheckTable, DetectsBrokenTables) {
  RemapTable t = identity_table({8, 8});
  EXPECT_NO_THROW(check_table(t));
  t.coords[10] = 9.0f;
  EXPECT_THROW(check_table(t), InvariantBreach);
  t = identity_table({8, 8});
  t.mask.pop_back();
  EXPECT_THROW(check_table(t), InvariantBreach);
}

struct OracleCase {
  SourceKind kind;
  int channels;
  Interpolation interp;
  Border border;
};

TEST(Apply, MatchesScalarOracleOnRandomTables) {
  std::mt19937_64 rng(2024);
  const SourceKind kinds[] = {SourceKind::kRaster, SourceKind::kEquirect, SourceKind::kCubemap};
  for (int trial = 0; trial < 16; ++trial) {
    const SourceKind kind = kinds[trial % 3];
    const int channels = (trial / 3) % 2 ? 4 : 3;
    const Border border = (trial / 2) % 2 ? Border::kBlack : Border::kClamp;
    const ImageSize dst{17 + int(rng() % 60), 9 + int(rng() % 50)};
    ImageSize src;
    if (kind == SourceKind::kEquirect) {
      const int h = 8 + int(rng() % 40);
      src = {2 * h, h};
    } else if (kind == SourceKind::kCubemap) {
      const int n = 4 + int(rng() % 30);
      src = {n, n};
    } else {
      src = {5 + int(rng() % 70), 5 + int(rng() % 70)};
    }
    const RemapTable t = testsupport::random_table(kind, dst, src, rng());
    std::vector<RasterImage> imgs;
    for (int f = 0; f < (kind == SourceKind::kCubemap ? 6 : 1); ++f) {
      imgs.push_back(testsupport::noise(src, channels, rng()));
    }
    std::vector<const RasterImage*> ptrs;
    for (const auto& im : imgs) ptrs.push_back(&im);
    const bool wrap = kind == SourceKind::kEquirect;

    for (Interpolation interp : {Interpolation::kNearest, Interpolation::kBilinear}) {
      const SamplerConfig cfg{interp, border, true};
      RasterImage fast;
      if (kind == SourceKind::kCubemap) {
        std::array<RasterImage, 6> faces;
        for (int f = 0; f < 6; ++f) faces[f] = imgs[f];
        fast = apply(t, std::span<const RasterImage, 6>(faces), cfg, 1 + trial % 4);
      } else {
        fast = apply(t, imgs[0], cfg, 1 + trial % 4);
      }
      const RasterImage ref =
          testsupport::ref_apply(t, ptrs, interp == Interpolation::kBilinear, border == Border::kClamp, wrap);
      if (interp == Interpolation::kNearest) {
        ASSERT_EQ(fast, ref) << "trial " << trial;
      } else {
        ASSERT_LE(testsupport::max_abs_diff(fast, ref), 1) << "trial " << trial;
      }
    }
  }
}

TEST(Apply, MaskedPixelsAreOpaqueBlack) {
  RemapTable t = identity_table({4, 4});
  t.mask[5] = 0;
  const RasterImage src = testsupport::solid({4, 4}, {200, 100, 50});
  RasterImage rgba({4, 4}, 4, 77);
  const RasterImage out3 = apply(t, src);
  const RasterImage out4 = apply(t, rgba);
  EXPECT_EQ(out3.pixel(1, 1)[0], 0);
  EXPECT_EQ(out3.pixel(1, 1)[2], 0);
  EXPECT_EQ(out3.pixel(0, 0)[0], 200);
  EXPECT_EQ(out4.pixel(1, 1)[0], 0);
  EXPECT_EQ(out4.pixel(1, 1)[3], 255);
}

TEST(Apply, IdentityTableReproducesImage) {
  const RasterImage img = testsupport::noise({31, 17}, 3, 1);
  EXPECT_EQ(apply(identity_table({31, 17}), img), img);
  EXPECT_EQ(apply(identity_table({31, 17}), img, {Interpolation::kNearest}), img);
}

TEST(Apply, SeamWrapBlendsAcrossPanoramaEdge) {
  RasterImage pano({8, 4}, 3, 0);
  for (int y = 0; y < 4; ++y) {
    pano.pixel(0, y)[0] = 200;
    pano.pixel(7, y)[0] = 100;
  }
  // x = 7.5 sits halfway between the last and first columns.
  RemapTable t = build_table(SourceKind::kEquirect, {1, 1}, {8, 4}, [](int, int) {
    return std::optional<SourceSample>(SourceSample{7.5, 1.0, 0});
  });
  EXPECT_EQ(apply(t, pano).pixel(0, 0)[0], 150);
  EXPECT_EQ(apply(t, pano, {Interpolation::kBilinear, Border::kClamp, false}).pixel(0, 0)[0], 100);
}

TEST(Apply, RejectsMismatchedSources) {
  const RemapTable t = identity_table({8, 8});
  EXPECT_THROW(apply(t, RasterImage({9, 8}, 3)), DimensionMismatch);
  const RemapTable c = build_equirect_from_cubemap({16, 8}, 4);
  EXPECT_THROW(apply(c, RasterImage({4, 4}, 3)), DimensionMismatch);
  const CubemapFaces wrong = testsupport::solid_cubemap(5);
  EXPECT_THROW(apply(c, wrong.span()), DimensionMismatch);
}

TEST(Compose, IdentityIsNeutral) {
  const CameraModel& m = builtin_presets().at("param1").model;
  const RemapTable t = build_fisheye_from_equirect(m, {64, 64}, {256, 128});
  EXPECT_EQ(compose(identity_table({64, 64}), t), t);
  const RemapTable right = compose(t, identity_table({256, 128}, SourceKind::kEquirect));
  for (std::size_t k = 0; k < t.size(); ++k) {
    ASSERT_EQ(right.valid_at(k), t.valid_at(k));
    if (!t.valid_at(k)) continue;
    ASSERT_NEAR(right.x(k), t.x(k), 1e-4);
    ASSERT_NEAR(right.y(k), t.y(k), 1e-4);
  }
}

TEST(Compose, TwoStageChainApproximatesFusedTable) {
  const CameraModel& m = builtin_presets().at("seen_param").model;
  const int n = 128;
  const RemapTable outer = build_fisheye_from_equirect(m, {128, 128}, {1024, 512});
  const RemapTable inner = build_equirect_from_cubemap({1024, 512}, n);
  const RemapTable chained = compose(outer, inner);
  const RemapTable fused = build_fisheye_from_cubemap(m, {128, 128}, n);
  check_table(chained);
  std::size_t close = 0, total = 0;
  for (std::size_t k = 0; k < fused.size(); ++k) {
    ASSERT_EQ(chained.valid_at(k), fused.valid_at(k));
    if (!fused.valid_at(k)) continue;
    ++total;
    if (chained.faces[k] == fused.faces[k] && std::abs(chained.x(k) - fused.x(k)) < 0.1 &&
        std::abs(chained.y(k) - fused.y(k)) < 0.1) {
      ++close;
    }
  }
  // Only entries straddling a face seam may disagree.
  EXPECT_GT(static_cast<double>(close) / total, 0.98);
}

TEST(Compose, RejectsGeometryMismatch) {
  const RemapTable a = identity_table({8, 8});
  const RemapTable b = identity_table({9, 9});
  EXPECT_THROW(compose(a, b), GeometryMismatch);
  const RemapTable cube = build_equirect_from_cubemap({16, 8}, 4);
  EXPECT_THROW(compose(cube, a), GeometryMismatch);
}
