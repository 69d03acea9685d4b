#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gp {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance for projective equality, loxodromy and determinant checks.
inline constexpr double kTol = 1e-9;

enum class ErrorCode {
  NotLoxodromic,
  SharedEndpoint,
  BadDeterminant,
  ParseError,
  CuffOutOfWindow,
  DegenerateConfiguration,
  LatticeMismatch,
  UnbalancedSides,
  UnmatchedEnd,
  OrientationClash,
  ZeroMeasure,
  BridgeRemains,
  NoEligibleSwap,
  InvalidWeights,
  ZeroBulk,
  UnsupportedObservable,
  DegenerateEquidistant,
  InvalidCurvature,
  VacuousBound,
  OutOfDomain,
  InvalidGenus,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotLoxodromic: return "NotLoxodromic";
    case ErrorCode::SharedEndpoint: return "SharedEndpoint";
    case ErrorCode::BadDeterminant: return "BadDeterminant";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CuffOutOfWindow: return "CuffOutOfWindow";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::UnbalancedSides: return "UnbalancedSides";
    case ErrorCode::UnmatchedEnd: return "UnmatchedEnd";
    case ErrorCode::OrientationClash: return "OrientationClash";
    case ErrorCode::ZeroMeasure: return "ZeroMeasure";
    case ErrorCode::BridgeRemains: return "BridgeRemains";
    case ErrorCode::NoEligibleSwap: return "NoEligibleSwap";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::ZeroBulk: return "ZeroBulk";
    case ErrorCode::UnsupportedObservable: return "UnsupportedObservable";
    case ErrorCode::DegenerateEquidistant: return "DegenerateEquidistant";
    case ErrorCode::InvalidCurvature: return "InvalidCurvature";
    case ErrorCode::VacuousBound: return "VacuousBound";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidGenus: return "InvalidGenus";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Reduces x into [0, period).
inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

/// Reduces an angle into (-pi, pi].
inline double wrap_angle(double theta) {
  double r = wrap(theta + kPi, kTwoPi) - kPi;
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace gp
