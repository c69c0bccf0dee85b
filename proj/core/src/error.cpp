#include "glosskit/error.hpp"

namespace glosskit {

const char* to_string(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kFormat:
      return "format";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kData:
      return "data";
  }
  return "unknown";
}

}  // namespace glosskit
