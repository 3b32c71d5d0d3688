#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavetraj {

enum class ErrorKind {
  NonPositiveParameter,
  EvenRayCount,
  TooFewRays,
  FitWindowTooSmall,
  RelativisticEnergyBelowRestMass,
  NoBracket,
  WindowTooSmall,
  AmplitudeUnderflow,
  LongitudinalStall,
  CausticCollapse,
  RelativisticPole,
  NonFinite,
  MaxStepsExceeded,
  UnknownScenario,
  InvalidOverride,
  ConfigParse,
  IoFailure,
  MalformedCsv,
  EmptyOverlap,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above; the
/// kind name is what ends up in summary.json.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wavetraj
