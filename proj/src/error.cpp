#include "mdsense/error.hpp"

namespace mdsense {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::InvalidRank: return "InvalidRank";
    case ErrorKind::TooManySamples: return "TooManySamples";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotOrthonormal: return "NotOrthonormal";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::Divergence: return "Divergence";
    case ErrorKind::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mdsense
