#pragma once

// On-disk cache for remap tables.
//
// File layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "FSRT"
//   4       4     u32 format version (1)
//   8       1     u8 source kind (0 raster, 1 equirect, 2 cubemap)
//   9       3     reserved, zero
//   12      16    u32 dst width, dst height, src width, src height
//   28      4     u32 recipe length L
//   32      L     recipe text (the canonical description the key hashes)
//   ...     8n    f32 x, f32 y per destination pixel (IEEE-754 binary32)
//   ...     n     u8 face index per pixel (cubemap sources only)
//   ...     ⌈n/8⌉ validity mask, bit k of byte k/8 (LSB first) = pixel k
//   ...     4     u32 CRC-32 (zlib polynomial) of every preceding byte
//
// n = dst width * dst height.

#include <zlib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fisheyesim/camera.hpp"
#include "fisheyesim/error.hpp"
#include "fisheyesim/remap.hpp"

namespace fisheyesim {

inline constexpr std::array<char, 4> kCacheMagic = {'F', 'S', 'R', 'T'};
inline constexpr std::uint32_t kCacheVersion = 1;

/// Shortest decimal text that round-trips to the same double.
inline std::string exact_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

/// Everything that determines a table's contents.
struct TableRecipe {
  std::string stage;  // "equirect_from_cubemap", "fisheye_from_equirect", "fisheye_from_cubemap"
  std::optional<CameraModel> model;
  ImageSize dst{};
  ImageSize src{};
  std::optional<double> fov_cap;

  /// Unambiguous text form; distinct recipes always give distinct text.
  std::string canonical() const {
    std::string s = "v" + std::to_string(kCacheVersion) + ";stage=" + stage;
    s += ";dst=" + to_string(dst) + ";src=" + to_string(src);
    if (model) {
      s += ";family=" + std::string(family_name(model->family()));
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            s += ";f=" + exact_double(p.f);
            if constexpr (std::is_same_v<T, EucmParams>) {
              s += ";alpha=" + exact_double(p.alpha) + ";beta=" + exact_double(p.beta);
            } else if constexpr (std::is_same_v<T, DsParams>) {
              s += ";alpha=" + exact_double(p.alpha) + ";xi=" + exact_double(p.xi);
            }
            s += ";cx=" + exact_double(p.cx) + ";cy=" + exact_double(p.cy);
          },
          model->params());
      s += ";scale=" + exact_double(model->output_scale());
    }
    s += ";cap=" + (fov_cap ? exact_double(*fov_cap) : std::string("none"));
    return s;
  }
};

/// Stable 16-hex-digit identifier (FNV-1a 64) of a recipe.
inline std::string cache_key(const TableRecipe& r) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : r.canonical()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw CorruptCache("remap cache file is truncated");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto s = take(4);
    return std::uint32_t(s[0]) | std::uint32_t(s[1]) << 8 | std::uint32_t(s[2]) << 16 |
           std::uint32_t(s[3]) << 24;
  }
  std::size_t pos() const noexcept { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_table(const RemapTable& t, const std::string& recipe = {}) {
  check_table(t);
  const std::size_t n = t.size();
  std::vector<std::uint8_t> out;
  out.reserve(40 + recipe.size() + 9 * n + n / 8 + 8);
  out.insert(out.end(), kCacheMagic.begin(), kCacheMagic.end());
  detail::put_u32(out, kCacheVersion);
  out.push_back(static_cast<std::uint8_t>(t.kind));
  out.insert(out.end(), 3, 0);
  for (int v : {t.dst.width, t.dst.height, t.src.width, t.src.height}) {
    detail::put_u32(out, static_cast<std::uint32_t>(v));
  }
  detail::put_u32(out, static_cast<std::uint32_t>(recipe.size()));
  out.insert(out.end(), recipe.begin(), recipe.end());
  for (float c : t.coords) detail::put_u32(out, std::bit_cast<std::uint32_t>(c));
  if (t.kind == SourceKind::kCubemap) out.insert(out.end(), t.faces.begin(), t.faces.end());
  std::vector<std::uint8_t> bits((n + 7) / 8, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (t.mask[k]) bits[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  }
  out.insert(out.end(), bits.begin(), bits.end());
  detail::put_u32(out, detail::crc32_of(out));
  return out;
}

struct LoadedTable {
  RemapTable table;
  std::string recipe;
};

inline LoadedTable deserialize_table(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 36) throw CorruptCache("remap cache file is truncated");
  const auto body = bytes.first(bytes.size() - 4);
  detail::Reader tail(bytes.last(4));
  if (tail.u32() != detail::crc32_of(body)) throw CorruptCache("remap cache checksum mismatch");

  detail::Reader r(body);
  auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kCacheMagic.begin())) {
    throw CorruptCache("not a remap cache file (bad magic)");
  }
  if (const auto v = r.u32(); v != kCacheVersion) {
    throw CorruptCache("unsupported remap cache version " + std::to_string(v));
  }
  LoadedTable lt;
  RemapTable& t = lt.table;
  const auto header = r.take(4);
  if (header[0] > 2) throw CorruptCache("unknown source kind in remap cache");
  t.kind = static_cast<SourceKind>(header[0]);
  t.dst = {static_cast<int>(r.u32()), static_cast<int>(r.u32())};
  t.src = {static_cast<int>(r.u32()), static_cast<int>(r.u32())};
  if (!t.dst.valid() || !t.src.valid() || t.dst.width > (1 << 16) || t.dst.height > (1 << 16)) {
    throw CorruptCache("implausible geometry in remap cache");
  }
  const std::uint32_t recipe_len = r.u32();
  auto recipe = r.take(recipe_len);
  lt.recipe.assign(recipe.begin(), recipe.end());
  const std::size_t n = t.size();
  t.coords.resize(2 * n);
  for (auto& c : t.coords) c = std::bit_cast<float>(r.u32());
  if (t.kind == SourceKind::kCubemap) {
    auto f = r.take(n);
    t.faces.assign(f.begin(), f.end());
  }
  auto bits = r.take((n + 7) / 8);
  t.mask.resize(n);
  for (std::size_t k = 0; k < n; ++k) t.mask[k] = (bits[k / 8] >> (k % 8)) & 1u;
  if (r.pos() != body.size()) throw CorruptCache("trailing bytes in remap cache file");
  try {
    check_table(t);
  } catch (const InvariantBreach& e) {
    throw CorruptCache(std::string("remap cache content invalid: ") + e.what());
  }
  return lt;
}

/// Writes bytes to `path` through a sibling temporary file and a rename, so
/// readers never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  static std::atomic<unsigned> counter{0};
  static const unsigned token = std::random_device{}();
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(token) + "_" + std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void save_table(const std::filesystem::path& path, const RemapTable& t, const std::string& recipe = {}) {
  write_file_atomic(path, serialize_table(t, recipe));
}

inline LoadedTable load_table(const std::filesystem::path& path) {
  return deserialize_table(read_file(path));
}

/// Directory of tables named <key>.fsrt. Safe for concurrent readers; a
/// concurrent writer of the same key replaces the file atomically with
/// identical content.
class TableCache {
 public:
  enum class Outcome { kHit, kMiss, kRebuiltCorrupt };

  explicit TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }

  std::filesystem::path path_for(const TableRecipe& r) const { return dir_ / (cache_key(r) + ".fsrt"); }

  /// Returns the cached table for the recipe, building and storing it on a
  /// miss. A corrupt or mismatching file is rebuilt and overwritten.
  RemapTable get_or_build(const TableRecipe& recipe, const std::function<RemapTable()>& build) {
    const auto path = path_for(recipe);
    const std::string canonical = recipe.canonical();
    last_ = Outcome::kMiss;
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
      try {
        LoadedTable lt = load_table(path);
        if (lt.recipe == canonical) {
          last_ = Outcome::kHit;
          return std::move(lt.table);
        }
      } catch (const CorruptCache&) {
      } catch (const IoError&) {
      }
      last_ = Outcome::kRebuiltCorrupt;
    }
    RemapTable t = build();
    save_table(path, t, canonical);
    return t;
  }

  Outcome last_outcome() const noexcept { return last_; }

 private:
  std::filesystem::path dir_;
  Outcome last_ = Outcome::kMiss;
};

}  // namespace fisheyesim
