#pragma once

#include <stdexcept>
#include <string>

namespace inferlab {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid distribution/model parameters or dimension mismatch.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Too few observations for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// All abscissae equal: the affine model is not identifiable.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

// Every grid node has zero posterior density.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

// An ensemble walker could not be placed inside the posterior support.
class InitializationError : public Error {
 public:
  using Error::Error;
};

// A log-density returned NaN (-inf is the only legal out-of-support value).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace inferlab
