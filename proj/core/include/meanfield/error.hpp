#pragma once

#include <stdexcept>
#include <string>

namespace mf {

/// Failure categories surfaced by the library. The CLI maps these to exit codes.
enum class ErrorKind {
  invalid_dimension,
  invalid_input,
  domain,
  resource_limit,
  numeric,
  diverged,
  unsupported,
  usage,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace mf
