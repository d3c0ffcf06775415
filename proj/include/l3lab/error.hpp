#pragma once

#include <stdexcept>
#include <string>

namespace l3lab {

/// Failure categories shared by every module.
enum class ErrorCode {
  InvalidArgument,
  StepUnderflow,
  NonFinite,
  MaxSteps,
  NoConvergence,
  NoBracket,
  Collision,
  OriginSingular,
  HyperbolicInput,
  NearBranchCut,
  SqrtDomain,
  TimeReparamSingular,
  TooClose,
  FitRejected,
  NoCrossing,
  EventDegenerate,
  PrecisionLoss,
};

[[nodiscard]] inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::StepUnderflow: return "step_underflow";
    case ErrorCode::NonFinite: return "non_finite";
    case ErrorCode::MaxSteps: return "max_steps";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::NoBracket: return "no_bracket";
    case ErrorCode::Collision: return "collision";
    case ErrorCode::OriginSingular: return "origin_singular";
    case ErrorCode::HyperbolicInput: return "hyperbolic_input";
    case ErrorCode::NearBranchCut: return "near_branch_cut";
    case ErrorCode::SqrtDomain: return "sqrt_domain";
    case ErrorCode::TimeReparamSingular: return "time_reparam_singular";
    case ErrorCode::TooClose: return "too_close";
    case ErrorCode::FitRejected: return "fit_rejected";
    case ErrorCode::NoCrossing: return "no_crossing";
    case ErrorCode::EventDegenerate: return "event_degenerate";
    case ErrorCode::PrecisionLoss: return "precision_loss";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace l3lab
