#pragma once

#include <stdexcept>
#include <string>

namespace cone_spectra {

enum class ErrorKind {
  // validation (exit code 2)
  DuplicateBranchPoints,
  BaseOnBranchPoint,
  NotABranchPoint,
  DomainError,
  InvalidConfig,
  CoincidentPoles,
  CoincidentArguments,
  ConeArgument,
  // convergence (exit code 3)
  NonConvergence,
  // numerical / internal (exit code 4)
  SingularityOnGrid,
  DegenerateJet,
  DegenerateZero,
  SmallLeadingCoefficient,
  PathTooCloseToBranchPoint,
  IllConditionedA,
  DiagonalEvaluation,
  SingularNormalizationSystem,
  InsufficientOrder,
  MissingJet,
  PoleEvaluation,
  FitIllConditioned,
  StepTooSmall,
  GridTooCoarse,
  ConsistencyFailure,
};

const char* error_name(ErrorKind k);

/// Process exit code associated with an error kind.
int exit_code(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cone_spectra
