#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace span_lattice {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands live on different state spaces or have incompatible shapes.
struct DimensionError : Error {
  using Error::Error;
};

// Input violates a domain precondition (negative entries, non-weak unit, ...).
struct DomainError : Error {
  using Error::Error;
};

// Malformed argument: empty list, unattained target value, bad strike order.
struct ArgumentError : Error {
  using Error::Error;
};

// Counterexample parameters violate the required ordering chain.
struct InvalidParametersError : Error {
  using Error::Error;
};

// The given basis does not span a sublattice.
struct NotASublatticeError : Error {
  using Error::Error;
};

// Claim cannot be replicated; carries best least-squares diagnostics.
struct SpanningFailure : Error {
  SpanningFailure(const std::string& msg, double residual_arg,
                  std::vector<std::size_t> block)
      : Error(msg), residual(residual_arg), violating_block(std::move(block)) {}

  double residual = 0.0;
  // States of one partition block on which the claim is not constant.
  std::vector<std::size_t> violating_block;
};

// Requested element lies outside the span of the sublattice.
struct NoApproximationError : Error {
  using Error::Error;
};

// A documented call contract was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Iteration cap exhausted before stabilization.
struct NonConvergenceError : Error {
  using Error::Error;
};

// Malformed input file.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace span_lattice
