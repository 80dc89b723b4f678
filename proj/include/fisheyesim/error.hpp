#pragma once

#include <stdexcept>
#include <string>

namespace fisheyesim {

/// Base of every error raised by the library.
///
/// The category drives the command-line exit code: usage and validation
/// problems map to 1, I/O to 2 and broken internal invariants to 3.
class Error : public std::runtime_error {
 public:
  enum class Category { kValidation, kIo, kInternal };

  explicit Error(const std::string& what, Category category = Category::kValidation)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class UnachievableFov : public Error {
 public:
  using Error::Error;
};

class AspectError : public Error {
 public:
  using Error::Error;
};

class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateCrop : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  /// 1-based line of the offending item, or -1 when not tied to a location.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what, Category::kIo) {}
};

class CorruptCache : public Error {
 public:
  explicit CorruptCache(const std::string& what) : Error(what, Category::kIo) {}
};

class InvariantBreach : public Error {
 public:
  explicit InvariantBreach(const std::string& what) : Error(what, Category::kInternal) {}
};

}  // namespace fisheyesim
