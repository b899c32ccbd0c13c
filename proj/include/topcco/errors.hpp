// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace topcco {

// Base for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No feasible configuration exists (or a supplied configuration is
// infeasible).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Solver budget exhausted before any incumbent was found, or before
// optimality was proven when it was required.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

// An operation refused to run (oversized brute force, compromised counter).
class RefusedError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace topcco
