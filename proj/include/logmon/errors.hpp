#pragma once

#include <stdexcept>
#include <string>

namespace logmon {

enum class ErrorKind {
  NoWeighting,
  NotSubmonoid,
  NotSurjective,
  TorsionTarget,
  NoPositiveFunctional,
  NotInGroupSpan,
  NonInvertibleConstantTerm,
  SaturationIncomplete,
  NotSemiSaturated,
  IrrationalExponent,
  NonCommutingResidues,
  SingularSylvester,
  ZeroProjection,
  DenominatorVanishes,
  BudgetExceeded,
  SingularSystem,
  NonIntegrable,
  InvalidArgument,
  ParseError,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoWeighting: return "NoWeighting";
    case ErrorKind::NotSubmonoid: return "NotSubmonoid";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::TorsionTarget: return "TorsionTarget";
    case ErrorKind::NoPositiveFunctional: return "NoPositiveFunctional";
    case ErrorKind::NotInGroupSpan: return "NotInGroupSpan";
    case ErrorKind::NonInvertibleConstantTerm: return "NonInvertibleConstantTerm";
    case ErrorKind::SaturationIncomplete: return "SaturationIncomplete";
    case ErrorKind::NotSemiSaturated: return "NotSemiSaturated";
    case ErrorKind::IrrationalExponent: return "IrrationalExponent";
    case ErrorKind::NonCommutingResidues: return "NonCommutingResidues";
    case ErrorKind::SingularSylvester: return "SingularSylvester";
    case ErrorKind::ZeroProjection: return "ZeroProjection";
    case ErrorKind::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace logmon
