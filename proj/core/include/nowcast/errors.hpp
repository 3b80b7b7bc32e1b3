#pragma once

#include <stdexcept>
#include <string>

namespace nowcast {

enum class ErrorKind {
  Shape,       // dimension or channel mismatch
  Format,      // bad magic / unknown version
  Corruption,  // truncated or inconsistent payload
  Data,        // value outside the admissible domain (NaN, negative BT, ...)
  Degenerate,  // input carries no information for the requested operation
  Config,      // invalid configuration value
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. The kind lets callers (and the CLI)
/// map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace nowcast
