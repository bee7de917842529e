#ifndef PRUNELAB_ERROR_HPP
#define PRUNELAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace prunelab {

// Error taxonomy used across the library. Everything derives from Error so
// callers can catch broadly or per category.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error("shape error: " + msg) {}
};

struct InputError : Error {
  explicit InputError(const std::string& msg) : Error("input error: " + msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error("usage error: " + msg) {}
};

struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error("format error: " + msg) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error("numeric error: " + msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

}  // namespace prunelab

#endif
