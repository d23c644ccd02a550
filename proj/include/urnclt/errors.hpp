#pragma once

#include <stdexcept>
#include <string>

namespace urnclt {

// Failure categories. Input and precondition problems map to process exit
// code 2, numerical-method failures to exit code 3; verification verdicts
// that fail use exit code 1 (handled by the CLI, not by exceptions).
enum class ErrorKind {
  Parse,
  Domain,
  NotStochastic,
  NotIrreducible,
  SingularCombination,
  MissingCheckpoint,
  NotSupercritical,
  NotScalarBlock,
  NotEigenvectorColumn,
  DefectiveOrClustered,
  NonConvergence,
  UnstableA,
  DegenerateVariance,
  Overflow,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::SingularCombination: return "SingularCombination";
    case ErrorKind::MissingCheckpoint: return "MissingCheckpoint";
    case ErrorKind::NotSupercritical: return "NotSupercritical";
    case ErrorKind::NotScalarBlock: return "NotScalarBlock";
    case ErrorKind::NotEigenvectorColumn: return "NotEigenvectorColumn";
    case ErrorKind::DefectiveOrClustered: return "DefectiveOrClustered";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::UnstableA: return "UnstableA";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::Overflow: return "Overflow";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::DefectiveOrClustered:
      case ErrorKind::NonConvergence:
      case ErrorKind::UnstableA:
      case ErrorKind::DegenerateVariance:
      case ErrorKind::Overflow:
        return 3;
      default:
        return 2;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace urnclt
