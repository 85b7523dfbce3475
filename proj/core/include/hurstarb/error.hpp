#pragma once

#include <stdexcept>
#include <string>

namespace hurstarb {

// Base of all library errors. Preconditions on arguments throw
// std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, series, panels).
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not produce a valid result
// (non-positive-definite matrix, divergence, zero normalizer).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hurstarb
