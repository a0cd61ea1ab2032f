#pragma once

#include <stdexcept>
#include <string>

namespace spinpair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Central-population form of Delta with hbar*omega_delta +/- (J + Dd) == 0.
class DegenerateCoupling : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

class RankDeficiency : public Error {
 public:
  using Error::Error;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

class NoMaxima : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A measurement combination with no real solution (negative discriminant).
class InconsistentMeasurement : public Error {
 public:
  InconsistentMeasurement(const std::string& what, double sigmas_below_zero)
      : Error(what), sigmas_below_zero_(sigmas_below_zero) {}
  double sigmas_below_zero() const noexcept { return sigmas_below_zero_; }

 private:
  double sigmas_below_zero_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinpair
