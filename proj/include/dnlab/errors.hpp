#pragma once

#include <stdexcept>
#include <string>

namespace dnlab {

// Common base so callers can catch any library failure with one handler.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Boundary-operator algebra.
struct SingularDN : Error {
  using Error::Error;
};
struct NotMeanZero : Error {
  using Error::Error;
};
struct TruncationMismatch : Error {
  using Error::Error;
};

// Meshing and FEM solves.
struct GeometryError : Error {
  using Error::Error;
};
struct MeshError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};
struct DegenerateBasis : Error {
  using Error::Error;
};

// Spectral extraction.
struct MultipleCandidates : Error {
  using Error::Error;
};

// Period computations.
struct LargeResidual : Error {
  using Error::Error;
};
struct NormalizationViolated : Error {
  using Error::Error;
};
struct DivisionByZero : Error {
  using Error::Error;
};
struct NotSiegel : Error {
  using Error::Error;
};

// Theta constants and classification.
struct SlowConvergence : Error {
  using Error::Error;
};
struct NearDegenerate : Error {
  NearDegenerate(const std::string& msg, std::string constant)
      : Error(msg), constant_name(std::move(constant)) {}
  std::string constant_name;  // which theta constant vanished, e.g. "e1111"
};
struct InsufficientData : Error {
  using Error::Error;
};

// Collar formulas.
struct NonPositiveLength : Error {
  using Error::Error;
};
struct NonPositiveModulus : Error {
  using Error::Error;
};

// File formats and experiment configuration.
struct ParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dnlab
