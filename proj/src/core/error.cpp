#include "lpvdd/core/error.hpp"

namespace lpvdd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::IllPosed: return "ill-posed";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Io: return "i/o";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace lpvdd
