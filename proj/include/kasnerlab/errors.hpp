#pragma once

#include <stdexcept>
#include <string>

namespace kasnerlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration (grid, integrator, norm parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A linear solve did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double final_residual)
      : Error(what), final_residual_(final_residual) {}
  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

// A solution slice violates its invariants (non-SPD metric, non-positive lapse).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

// The lapse solve produced n <= 0 somewhere: the run left the perturbative regime.
class InvalidLapseError : public InvalidStateError {
 public:
  InvalidLapseError(const std::string& what, double n_min)
      : InvalidStateError(what), n_min_(n_min) {}
  double n_min() const { return n_min_; }

 private:
  double n_min_;
};

}  // namespace kasnerlab
