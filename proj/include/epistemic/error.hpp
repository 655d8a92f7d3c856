#pragma once

#include <stdexcept>
#include <string>

namespace epi {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch,
  UnsupportedDimension,
  DegenerateSpan,
  NotConverged,
  Precondition,
  Io,
  Parse,
};

// Every failure raised by the library carries one of the codes above; the C
// API maps them 1:1 onto epi_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace epi
