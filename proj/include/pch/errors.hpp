#pragma once

#include <stdexcept>
#include <string>

namespace pch {

/// Malformed or inconsistent problem data (dimensions, ranges, PSD-ness).
class InvalidProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that could not be read or parsed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed: non-convergence, divergence, or a
/// combinatorial limit that makes the exact solve unaffordable.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pch
