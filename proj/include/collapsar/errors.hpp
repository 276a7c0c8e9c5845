#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace collapsar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// One or more parameter invariants are violated; carries every violation.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// The profile equation's coefficient of f'(z) vanished (the ODE is not
/// solvable for the derivative at this state).
class DegenerateDenominator : public Error {
 public:
  DegenerateDenominator(double z, double f);
  double z() const noexcept { return z_; }
  double f() const noexcept { return f_; }

 private:
  double z_;
  double f_;
};

/// Adaptive step size fell below the resolvable limit.
class StiffnessFailure : public Error {
 public:
  StiffnessFailure(double x, std::vector<double> state);
  double x() const noexcept { return x_; }
  const std::vector<double>& state() const noexcept { return state_; }

 private:
  double x_;
  std::vector<double> state_;
};

/// Evaluation requested at or past the time where a(t) vanishes.
class BlowupReached : public Error {
 public:
  BlowupReached(double t, double blowup_time);
  double t() const noexcept { return t_; }
  double blowup_time() const noexcept { return blowup_time_; }

 private:
  double t_;
  double blowup_time_;
};

/// A derived quantity left its admissible range (e.g. a(t) <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace collapsar
