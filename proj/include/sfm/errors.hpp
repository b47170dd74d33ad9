#pragma once

#include <stdexcept>
#include <string>

namespace sfm {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite or otherwise malformed numeric input.
struct InputError : Error {
  using Error::Error;
};

// A precondition on the mathematical domain of an operation was violated
// (subspace not contained in ambient, form of the wrong symmetry, ...).
struct DomainError : Error {
  using Error::Error;
};

// A linear solve or similar numeric step lost too much accuracy.
struct NumericError : Error {
  using Error::Error;
};

// The spectral-flow certifier exhausted its refinement budget.
struct CertificationError : Error {
  CertificationError(const std::string& what, double t0, double t1)
      : Error(what), t0(t0), t1(t1) {}
  double t0;
  double t1;
};

// The sampling oracle could not pair eigenvalue tracks unambiguously.
struct OracleInconclusive : Error {
  using Error::Error;
};

// A Lagrangian left the domain of the graph chart in use.
struct ChartError : Error {
  using Error::Error;
};

// No admissible chart cover of a Lagrangian path was found.
struct ChartCoverError : Error {
  using Error::Error;
};

// A randomized search ran out of retries.
struct SearchError : Error {
  using Error::Error;
};

// Scenario / instance file could not be parsed or failed schema validation.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace sfm
