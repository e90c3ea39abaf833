#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trace_formulary {

/// Failure categories surfaced by the engine. The CLI maps every kind to exit
/// code 2; an identity that does not balance is a report, not an error.
enum class ErrorKind {
  InvalidInput,
  NonConvergent,
  PoleAtOne,
  NotFundamental,
  StepTooCoarse,
  ValidationFailed,
  SupersingularOrReal,
  FieldTooLarge,
  Singular,
  NotOrdinary,
  UnvalidatedZeros,
  SupportContainsZero,
  DegenerateAtK,
  NonInvertibleCohomology,
  InconsistentGenerator,
  MismatchAt,
  NotCM,
  RationalSlope,
  Unsupported,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::PoleAtOne: return "PoleAtOne";
    case ErrorKind::NotFundamental: return "NotFundamental";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::SupersingularOrReal: return "SupersingularOrReal";
    case ErrorKind::FieldTooLarge: return "FieldTooLarge";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotOrdinary: return "NotOrdinary";
    case ErrorKind::UnvalidatedZeros: return "UnvalidatedZeros";
    case ErrorKind::SupportContainsZero: return "SupportContainsZero";
    case ErrorKind::DegenerateAtK: return "DegenerateAtK";
    case ErrorKind::NonInvertibleCohomology: return "NonInvertibleCohomology";
    case ErrorKind::InconsistentGenerator: return "InconsistentGenerator";
    case ErrorKind::MismatchAt: return "MismatchAt";
    case ErrorKind::NotCM: return "NotCM";
    case ErrorKind::RationalSlope: return "RationalSlope";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by validate_zeros; carries the first ordinate whose L-value is not small.
class ValidationFailed : public Error {
 public:
  ValidationFailed(double ordinate, double magnitude, const std::string& what)
      : Error(ErrorKind::ValidationFailed, what), ordinate_(ordinate), magnitude_(magnitude) {}

  double ordinate() const noexcept { return ordinate_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  double ordinate_;
  double magnitude_;
};

/// Raised by the exact-power routines when det(I - B) vanishes.
class DegenerateAtK : public Error {
 public:
  DegenerateAtK(long k, const std::string& what)
      : Error(ErrorKind::DegenerateAtK, what), k_(k) {}

  long k() const noexcept { return k_; }

 private:
  long k_;
};

/// Raised when two delta combs differ; carries the comb index and both coefficients as text.
class MismatchAt : public Error {
 public:
  MismatchAt(long n, std::string lhs, std::string rhs)
      : Error(ErrorKind::MismatchAt, "comb coefficient at n = " + std::to_string(n) + ": lhs " + lhs + " != rhs " + rhs),
        n_(n),
        lhs_(std::move(lhs)),
        rhs_(std::move(rhs)) {}

  long n() const noexcept { return n_; }
  const std::string& lhs() const noexcept { return lhs_; }
  const std::string& rhs() const noexcept { return rhs_; }

 private:
  long n_;
  std::string lhs_, rhs_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace trace_formulary
