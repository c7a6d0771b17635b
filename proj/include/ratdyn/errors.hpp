#pragma once

#include <stdexcept>
#include <string>

namespace ratdyn {

// Base of every error raised by the library. Callers that only care about
// "something failed" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root finding or another iterative scheme missed its tolerance in budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// A configured size limit (tree nodes, polynomial degree, pixels) was hit.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A test function without a value at the point at infinity was asked for one.
class EvaluationAtInfinity : public Error {
 public:
  using Error::Error;
};

// A tabulated function was queried farther than its lookup radius.
class LookupOutOfRange : public Error {
 public:
  using Error::Error;
};

// Operation called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerator and denominator share a root above tolerance.
class NotCoprime : public Error {
 public:
  using Error::Error;
};

// Some cover piece contains two distinct points of one fiber.
class CoverTooCoarse : public Error {
 public:
  using Error::Error;
};

// A simplicity witness did not verify at the requested tolerance.
class WitnessFailed : public Error {
 public:
  using Error::Error;
};

class UnknownExample : public Error {
 public:
  using Error::Error;
};

// Malformed map or test-function expression.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratdyn
