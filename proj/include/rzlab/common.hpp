// Shared value types, error hierarchy and compensated accumulators.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rzlab {

using Complex = std::complex<double>;

// Error hierarchy. The CLI maps each class onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition on an argument violated (out of range, unsorted, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Structured input (a sequence prefix, a config file) is inconsistent.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit a pole or a (near) vanishing Euler factor.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A model invariant or a persisted digest did not hold.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// s = sigma + i t.
struct ComplexPoint {
  double sigma = 0.0;
  double t = 0.0;

  [[nodiscard]] Complex value() const { return {sigma, t}; }
  [[nodiscard]] bool finite() const { return std::isfinite(sigma) && std::isfinite(t); }
  friend bool operator==(const ComplexPoint&, const ComplexPoint&) = default;
};

/// n^{-s} for real n > 0 on the principal branch: exp(-s ln n).
inline Complex dirichlet_power(double log_n, ComplexPoint s) {
  const double mag = std::exp(-s.sigma * log_n);
  if (s.t == 0.0) return {mag, 0.0};
  const double phase = -s.t * log_n;
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

// Neumaier variant of Kahan summation; stays accurate when a term exceeds the
// running sum in magnitude.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  CompensatedComplexSum& operator+=(Complex z) {
    add(z);
    return *this;
  }
  [[nodiscard]] Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

std::string to_string(ComplexPoint s);

}  // namespace rzlab
