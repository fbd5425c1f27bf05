#pragma once

#include <stdexcept>
#include <string>

namespace nadyn {

/// Base of every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition was violated (division by zero, pole in a
/// ball, exponent outside the value group, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or value.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The local models do not satisfy the hypotheses of the gluing
/// construction (overlapping balls, images outside the unit ball, ...).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace nadyn
