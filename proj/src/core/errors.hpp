#pragma once

#include <stdexcept>
#include <string>

namespace hfcqed {

// Error categories shared with the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  not_converged = 2,
  pole_proximity = 3,
  domain = 4,       // input outside a documented validity region
  singular = 5,     // degenerate / underdetermined problem
  io = 6,
  unsupported = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace hfcqed
