#include "cone_spectra/error.hpp"

namespace cone_spectra {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateBranchPoints: return "DuplicateBranchPoints";
    case ErrorKind::BaseOnBranchPoint: return "BaseOnBranchPoint";
    case ErrorKind::NotABranchPoint: return "NotABranchPoint";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::CoincidentPoles: return "CoincidentPoles";
    case ErrorKind::CoincidentArguments: return "CoincidentArguments";
    case ErrorKind::ConeArgument: return "ConeArgument";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularityOnGrid: return "SingularityOnGrid";
    case ErrorKind::DegenerateJet: return "DegenerateJet";
    case ErrorKind::DegenerateZero: return "DegenerateZero";
    case ErrorKind::SmallLeadingCoefficient: return "SmallLeadingCoefficient";
    case ErrorKind::PathTooCloseToBranchPoint: return "PathTooCloseToBranchPoint";
    case ErrorKind::IllConditionedA: return "IllConditionedA";
    case ErrorKind::DiagonalEvaluation: return "DiagonalEvaluation";
    case ErrorKind::SingularNormalizationSystem: return "SingularNormalizationSystem";
    case ErrorKind::InsufficientOrder: return "InsufficientOrder";
    case ErrorKind::MissingJet: return "MissingJet";
    case ErrorKind::PoleEvaluation: return "PoleEvaluation";
    case ErrorKind::FitIllConditioned: return "FitIllConditioned";
    case ErrorKind::StepTooSmall: return "StepTooSmall";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ConsistencyFailure: return "ConsistencyFailure";
  }
  return "Unknown";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateBranchPoints:
    case ErrorKind::BaseOnBranchPoint:
    case ErrorKind::NotABranchPoint:
    case ErrorKind::DomainError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::CoincidentPoles:
    case ErrorKind::CoincidentArguments:
    case ErrorKind::ConeArgument:
      return 2;
    case ErrorKind::NonConvergence:
      return 3;
    default:
      return 4;
  }
}

}  // namespace cone_spectra
