#pragma once

#include <stdexcept>
#include <string>

namespace gci {

enum class ErrorKind {
  InvalidInput,
  InvalidDistribution,
  Domain,
  UnsupportedGenerator,
  SingularGradient,
  SingularReference,
  Resolution,
  Construction,
  Precondition,
  Parameter,
  Numeric,
  RootNotFound,
  Size,
  DegenerateTransition,
  ExpansionSingularity,
};

const char* to_string(ErrorKind kind);

// Every library failure carries a kind and the name of the operation that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string operation, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  ErrorKind kind_;
  std::string operation_;
};

[[noreturn]] void fail(ErrorKind kind, const char* operation, const std::string& message);

}  // namespace gci
