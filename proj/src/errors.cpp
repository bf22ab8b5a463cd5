#include "gci/errors.hpp"

namespace gci {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidDistribution: return "invalid-distribution";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::UnsupportedGenerator: return "unsupported-generator";
    case ErrorKind::SingularGradient: return "singular-gradient";
    case ErrorKind::SingularReference: return "singular-reference";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::RootNotFound: return "root-not-found";
    case ErrorKind::Size: return "size";
    case ErrorKind::DegenerateTransition: return "degenerate-transition";
    case ErrorKind::ExpansionSingularity: return "expansion-singularity";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string operation, const std::string& message)
    : std::runtime_error(operation + ": " + message), kind_(kind), operation_(std::move(operation)) {}

void fail(ErrorKind kind, const char* operation, const std::string& message) {
  throw Error(kind, operation, message);
}

}  // namespace gci
