#pragma once

// PNG reading/writing and the cubemap directory convention.

#include <png.h>

#include <array>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "fisheyesim/error.hpp"
#include "fisheyesim/image.hpp"
#include "fisheyesim/pipeline.hpp"
#include "fisheyesim/remap_cache.hpp"

namespace fisheyesim {

/// Reads an 8-bit PNG. Images with an alpha channel load as RGBA, all
/// others (grey, palette, RGB) as RGB.
inline RasterImage read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
    const std::string msg = img.message;
    png_image_free(&img);
    if (!std::filesystem::exists(path)) throw IoError("cannot open " + path.string());
    throw IoError("cannot read PNG " + path.string() + ": " + msg);
  }
  const bool alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  img.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  const int channels = alpha ? 4 : 3;
  RasterImage out(ImageSize{static_cast<int>(img.width), static_cast<int>(img.height)}, channels);
  if (!png_image_finish_read(&img, nullptr, out.data().data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(img, size, 0, image.data().data(), 0, nullptr)) {
    throw IoError(std::string("cannot size PNG: ") + img.message);
  }
  std::vector<std::uint8_t> bytes(size);
  if (!png_image_write_to_memory(&img, bytes.data(), &size, 0, image.data().data(), 0, nullptr)) {
    throw IoError(std::string("cannot encode PNG: ") + img.message);
  }
  bytes.resize(size);
  return bytes;
}

/// Writes through a temporary file and a rename; an interrupted run never
/// leaves a truncated PNG behind.
inline void write_png(const std::filesystem::path& path, const RasterImage& image) {
  write_file_atomic(path, encode_png(image));
}

inline constexpr const char* kCubemapManifest = "cubemap.yaml";

/// Loads front.png, back.png, left.png, right.png, up.png and down.png from
/// `dir`. A cubemap.yaml in the directory may map face names to other file
/// names, e.g. `front: cam_0.png`.
inline CubemapFaces load_cubemap(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("cubemap directory " + dir.string() + " does not exist");
  std::array<std::string, 6> files;
  for (Face f : kAllFaces) files[face_index(f)] = std::string(face_name(f)) + ".png";
  const fs::path manifest = dir / kCubemapManifest;
  if (fs::exists(manifest)) {
    YAML::Node root;
    try {
      root = YAML::LoadFile(manifest.string());
    } catch (const YAML::Exception& e) {
      throw ConfigError(manifest.string() + ": " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
    }
    if (!root.IsMap()) throw ConfigError(manifest.string() + ": expected a mapping of face names to files");
    for (const auto& kv : root) {
      const std::string key = kv.first.as<std::string>();
      bool known = false;
      for (Face f : kAllFaces) {
        if (key == face_name(f)) {
          files[face_index(f)] = kv.second.as<std::string>();
          known = true;
        }
      }
      if (!known) {
        throw ConfigError(manifest.string() + ": unknown face '" + key + "'", kv.first.Mark().line + 1);
      }
    }
  }
  std::array<RasterImage, 6> faces;
  for (Face f : kAllFaces) {
    const fs::path p = dir / files[face_index(f)];
    if (!fs::exists(p)) {
      throw IoError("missing " + std::string(face_name(f)) + " face: " + p.string());
    }
    faces[face_index(f)] = read_png(p);
  }
  return CubemapFaces(std::move(faces));
}

inline void save_cubemap(const std::filesystem::path& dir, const CubemapFaces& faces) {
  for (Face f : kAllFaces) write_png(dir / (std::string(face_name(f)) + ".png"), faces[f]);
}

}  // namespace fisheyesim
