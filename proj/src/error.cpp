#include "zeroflow/error.hpp"

namespace zeroflow {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonPositiveLambda: return "NonPositiveLambda";
    case Errc::NonlinearCoefficient: return "NonlinearCoefficient";
    case Errc::ZeroSlope: return "ZeroSlope";
    case Errc::DegreeOutOfRange: return "DegreeOutOfRange";
    case Errc::KappaZero: return "KappaZero";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingRoots: return "MissingRoots";
    case Errc::NonMonotoneFlow: return "NonMonotoneFlow";
    case Errc::ZeroCollision: return "ZeroCollision";
    case Errc::PoleHit: return "PoleHit";
    case Errc::Divergent: return "Divergent";
    case Errc::NotMinimal: return "NotMinimal";
    case Errc::TooFewLevels: return "TooFewLevels";
    case Errc::DegenerateFit: return "DegenerateFit";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace zeroflow
