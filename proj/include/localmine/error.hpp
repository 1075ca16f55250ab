#pragma once

#include <stdexcept>
#include <string>

namespace localmine {

/// Raised for contract violations and unrecoverable input problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or I/O problem that must stop a run before any site is
/// processed (CLI exit code 1).
class FatalError : public Error {
 public:
  using Error::Error;
};

}  // namespace localmine
