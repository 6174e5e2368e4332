#pragma once

#include <stdexcept>
#include <string>

namespace innerfn {

/// Root of the library's exception hierarchy. The CLI maps the three
/// concrete categories onto exit codes 2 (parse), 3 (domain), 4 (resolution).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input description (spec files, eta tables on disk).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition failed: point outside the disk, value out of
/// range, proximity to boundary spectrum, invalid eta table, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SpectrumProximityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class GuardViolationError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidEtaError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The discretization cannot resolve the input (too many guarded nodes,
/// every direction flagged spectral, ...).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace innerfn
