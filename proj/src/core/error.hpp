#pragma once

#include <stdexcept>
#include <string>

namespace cms {

enum class ErrorCode {
  InvalidArgument,
  ParseError,       // expression / system file / CSV syntax
  DomainError,      // evaluation outside a function's domain, region mismatch
  ValidationError,  // probability positivity / normalization, bad structure
  ResourceLimit,    // enumeration caps, sampling retry budgets
  IoError,
};

// Single exception type used across the core; the C API and the CLI map
// `code` onto their status / exit-code vocabularies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cms
