#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace capflow {

// Base of every library error. code() is a stable machine-readable slug that
// the CLI prints in its single-line error format; what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define CAPFLOW_ERROR(Name, slug)                                     \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(slug, message) {} \
  }

CAPFLOW_ERROR(InvalidObservation, "invalid_observation");
CAPFLOW_ERROR(NonPositiveCapital, "non_positive_capital");
CAPFLOW_ERROR(NonPositiveConsumption, "non_positive_consumption");
CAPFLOW_ERROR(DuplicateYear, "duplicate_year");
CAPFLOW_ERROR(EmptyDerivation, "empty_derivation");
CAPFLOW_ERROR(MalformedHeader, "malformed_header");
CAPFLOW_ERROR(MalformedArtifact, "malformed_artifact");
CAPFLOW_ERROR(IoFailure, "io_failure");
CAPFLOW_ERROR(MissingInput, "missing_input");
CAPFLOW_ERROR(InvalidConversionFactor, "invalid_conversion_factor");
CAPFLOW_ERROR(InvalidReference, "invalid_reference");
CAPFLOW_ERROR(TransferImbalance, "transfer_imbalance");
CAPFLOW_ERROR(GeneratorInfeasible, "generator_infeasible");
CAPFLOW_ERROR(DegenerateEconomy, "degenerate_economy");
CAPFLOW_ERROR(UnsupportedFormat, "unsupported_format");
CAPFLOW_ERROR(NoOverlap, "no_overlap");
CAPFLOW_ERROR(InsufficientSeries, "insufficient_series");
CAPFLOW_ERROR(InvalidConfig, "invalid_config");

#undef CAPFLOW_ERROR

// Raised when a bookkeeping identity fails; identity() names the check.
class IdentityViolation : public Error {
 public:
  IdentityViolation(std::string identity, const std::string& message)
      : Error("identity_violation", identity + ": " + message),
        identity_(std::move(identity)) {}

  const std::string& identity() const noexcept { return identity_; }

 private:
  std::string identity_;
};

}  // namespace capflow
