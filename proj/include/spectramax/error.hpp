#pragma once

#include <stdexcept>
#include <string>

namespace spectramax {

/// Base exception. Every error carries a module-qualified code such as
/// "mesh.TopologyError" so the CLI can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SPECTRAMAX_DEFINE_ERROR(Name, Module)                                  \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(Module "." #Name, what) {}  \
  }

// mesh
SPECTRAMAX_DEFINE_ERROR(ParseError, "mesh");
SPECTRAMAX_DEFINE_ERROR(TopologyError, "mesh");
SPECTRAMAX_DEFINE_ERROR(DegenerateFace, "mesh");
SPECTRAMAX_DEFINE_ERROR(LimitExceeded, "mesh");
SPECTRAMAX_DEFINE_ERROR(DegenerateLattice, "mesh");

// fem
SPECTRAMAX_DEFINE_ERROR(DimensionMismatch, "fem");
SPECTRAMAX_DEFINE_ERROR(ZeroNorm, "fem");

// eig
SPECTRAMAX_DEFINE_ERROR(NoConvergence, "eig");
SPECTRAMAX_DEFINE_ERROR(AmbiguousCluster, "eig");

// heat
SPECTRAMAX_DEFINE_ERROR(PositivityBreach, "heat");

// maximize
SPECTRAMAX_DEFINE_ERROR(StallDetected, "maximize");
SPECTRAMAX_DEFINE_ERROR(EpsilonTooSmall, "maximize");

// certify
SPECTRAMAX_DEFINE_ERROR(CertificateSolveFailure, "certify");
SPECTRAMAX_DEFINE_ERROR(NotCertified, "certify");

// hyperbolic
SPECTRAMAX_DEFINE_ERROR(OutOfDomain, "hyperbolic");
SPECTRAMAX_DEFINE_ERROR(DomainViolation, "hyperbolic");
SPECTRAMAX_DEFINE_ERROR(DegenerateMass, "hyperbolic");
SPECTRAMAX_DEFINE_ERROR(BalanceNoConvergence, "hyperbolic");

// mosertrudinger
SPECTRAMAX_DEFINE_ERROR(FlowNoConvergence, "mosertrudinger");

// cli
SPECTRAMAX_DEFINE_ERROR(ConfigError, "cli");
SPECTRAMAX_DEFINE_ERROR(SchemaError, "cli");

#undef SPECTRAMAX_DEFINE_ERROR

}  // namespace spectramax
