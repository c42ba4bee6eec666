#include "meanfield/error.hpp"

namespace mf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::numeric: return "numeric-instability";
    case ErrorKind::diverged: return "diverged";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::usage: return "usage";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace mf
