#pragma once

#include <stdexcept>
#include <string>

namespace dg {

// Failure categories used across the library. Validation failures (bad
// regime, bad input) map to CLI exit code 2, numerical failures to 3.
enum class ErrorKind {
  InvalidArgument,
  NodeEncountered,
  MissingTimeDerivative,
  InvalidRegime,
  NegativeRadicand,
  NodefulMode,
  NonpositiveWidth,
  NonpositiveQ,
  StepSizeTooLarge,
  StabilityGuard,
  Diverged,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::Diverged || kind_ == ErrorKind::StepSizeTooLarge ||
           kind_ == ErrorKind::NonpositiveWidth || kind_ == ErrorKind::NonpositiveQ;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dg
