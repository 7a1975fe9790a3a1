#pragma once

#include <stdexcept>
#include <string>

namespace oscnet {

/// Precondition violation on a public operation (bad ids, dimensions, parameters).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical oracle could not produce a well-defined answer (singular systems and the like).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oscnet
