#pragma once

#include <stdexcept>
#include <string>

namespace mpgame {

enum class ErrorKind {
  kInvalidArgument,
  kNonFinite,
  kCoverage,
  kSingular,
  kParse,
  kIo,
};

// Single exception type for the library; callers switch on kind() when the
// distinction matters (the CLI maps every kind to a nonzero exit code).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

// Literal messages stay unconverted until the check fails.
inline void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) fail(kind, what);
}

}  // namespace mpgame
