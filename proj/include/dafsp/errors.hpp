#pragma once

#include <stdexcept>
#include <string>

namespace dafsp {

// Domain-level failure: bad input data or an infeasible model. The CLI maps
// these to exit code 1, as opposed to usage errors (exit 2).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed instance or coding file.
struct ParseError : DomainError {
  using DomainError::DomainError;
};

// No deadlock-free completion exists (amending ran out of candidates).
struct InfeasibleError : DomainError {
  using DomainError::DomainError;
};

}  // namespace dafsp
