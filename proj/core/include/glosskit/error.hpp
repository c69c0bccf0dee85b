#pragma once

#include <stdexcept>
#include <string>

namespace glosskit {

// Coarse failure categories. The CLI prints these as the first
// machine-parsable field of its one-line error output.
enum class ErrorCategory {
  kIo,      // file missing, unreadable, unwritable
  kFormat,  // malformed input file (header, field counts, parse failures)
  kConfig,  // invalid parameter or parameter/input combination
  kData     // semantically bad input (misaligned corpus, empty seed, ...)
};

const char* to_string(ErrorCategory cat);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCategory::kIo, msg);
}
[[noreturn]] inline void throw_format(const std::string& msg) {
  throw Error(ErrorCategory::kFormat, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCategory::kConfig, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorCategory::kData, msg);
}

}  // namespace glosskit
