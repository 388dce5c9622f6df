#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uimvdr {

enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kNumerical,
  kFormat,
  kIo,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure raised by the library carries a kind so that the command
// line can emit a machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) fail(kind, message);
}
inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace uimvdr
