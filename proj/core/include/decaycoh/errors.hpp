#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decaycoh {

// Base of every error thrown by the library. The CLI maps the three
// subclasses below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input, such as an out-of-range parameter or a malformed config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not deliver a result within its budget.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature ran out of panels before reaching its tolerance.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericalError(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

// Every ray is absorbed: the PSD integral vanishes and the coherence quotient
// is undefined.
class DegenerateFieldError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The image-source lattice holds more images than the configured budget.
class ImageBudgetError : public NumericalError {
 public:
  ImageBudgetError(const std::string& what, std::size_t budget)
      : NumericalError(what), budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace decaycoh
