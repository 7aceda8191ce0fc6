#pragma once

#include <stdexcept>
#include <string>

namespace lemlab {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameters outside the range where a formula is established
// (critical t, wrong regime, unsupported exponent).
class UnsupportedParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RegimeError : public UnsupportedParameterError {
 public:
  using UnsupportedParameterError::UnsupportedParameterError;
};

// A numerical routine could not reach its accuracy target.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Positive definiteness lost at the highest allowed precision.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, long degree, long bits)
      : std::runtime_error(what + " (degree " + std::to_string(degree) + ", " + std::to_string(bits) + " bits)"),
        degree_(degree),
        bits_(bits) {}
  long degree() const { return degree_; }
  long bits() const { return bits_; }

 private:
  long degree_;
  long bits_;
};

}  // namespace lemlab
