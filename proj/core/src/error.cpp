#include "uimvdr/error.hpp"

namespace uimvdr {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kShapeMismatch:
      return "shape_mismatch";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kFormat:
      return "format";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace uimvdr
