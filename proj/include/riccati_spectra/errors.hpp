#pragma once

#include <stdexcept>
#include <string>

namespace riccati_spectra {

/// Matrix shapes that do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to produce a result meeting its residual contract.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double matrix_norm)
      : std::runtime_error(what), matrix_norm_(matrix_norm) {}
  double matrix_norm() const noexcept { return matrix_norm_; }

 private:
  double matrix_norm_;
};

/// A factorization hit a non-positive pivot on a matrix required to be positive definite.
class DefinitenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular or ill-conditioned linear system.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// The Riccati equation has no stabilizing solution for this model. This is a
/// property of the model, not a numerical failure.
class NoStabilizingSolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// j*omega coincides with an eigenvalue of A.
class PoleAtFrequency : public std::runtime_error {
 public:
  PoleAtFrequency(const std::string& what, double omega)
      : std::runtime_error(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// Adaptive quadrature could not reach the requested tolerance. The worst
/// subinterval is reported in frequency units.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double worst_lo() const noexcept { return lo_; }
  double worst_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// The Riccati ODE produced non-finite entries.
class RiccatiBlowUp : public std::runtime_error {
 public:
  RiccatiBlowUp(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Monte Carlo failure. trial is -1 when the failure was detected before any
/// trial started.
class SimulationFailure : public std::runtime_error {
 public:
  SimulationFailure(const std::string& what, long trial, double time)
      : std::runtime_error(what), trial_(trial), time_(time) {}
  long trial() const noexcept { return trial_; }
  double time() const noexcept { return time_; }

 private:
  long trial_;
  double time_;
};

}  // namespace riccati_spectra
