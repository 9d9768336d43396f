#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zeroflow {

enum class Errc {
  InvalidArgument,
  NonPositiveLambda,
  NonlinearCoefficient,
  ZeroSlope,
  DegreeOutOfRange,
  KappaZero,
  ParseError,
  MissingRoots,
  NonMonotoneFlow,
  ZeroCollision,
  PoleHit,
  Divergent,
  NotMinimal,
  TooFewLevels,
  DegenerateFit,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable code. `index()` is set for errors
/// tied to a coefficient or level position (e.g. the offending lambda_n).
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace zeroflow
