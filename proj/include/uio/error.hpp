#pragma once

#include <stdexcept>
#include <string>

namespace uio {

enum class ErrorKind {
  kNonFinite,
  kDimensionMismatch,
  kPrecondition,
  kNotDetectable,
  kPoleSpec,
  kParse,
  kBudgetExhausted,
  kConditionViolated,
  kInvalidUio,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `kind` lets callers (the CLI in
// particular) tell "bad input" apart from "numerically refused".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace uio
