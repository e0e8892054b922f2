#pragma once

#include <stdexcept>
#include <string>

namespace smcp {

enum class ErrorCode {
  kInvalidArgument = 1,
  kTooLarge = 2,
  kInfeasible = 3,
  // An online algorithm broke the probe/commit rules.
  kContractViolation = 4,
  kIo = 5,
};

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

}  // namespace smcp
