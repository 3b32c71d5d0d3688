#include "wavetraj/errors.hpp"

namespace wavetraj {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::EvenRayCount: return "EvenRayCount";
    case ErrorKind::TooFewRays: return "TooFewRays";
    case ErrorKind::FitWindowTooSmall: return "FitWindowTooSmall";
    case ErrorKind::RelativisticEnergyBelowRestMass: return "RelativisticEnergyBelowRestMass";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::AmplitudeUnderflow: return "AmplitudeUnderflow";
    case ErrorKind::LongitudinalStall: return "LongitudinalStall";
    case ErrorKind::CausticCollapse: return "CausticCollapse";
    case ErrorKind::RelativisticPole: return "RelativisticPole";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::InvalidOverride: return "InvalidOverride";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::EmptyOverlap: return "EmptyOverlap";
  }
  return "Unknown";
}

}  // namespace wavetraj
