#pragma once

#include <stdexcept>
#include <string>

namespace gsdd {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Carries whatever partial estimate the failing routine had reached.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double estimate = 0.0,
                          double error_bound = 0.0)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}
}  // namespace detail

}  // namespace gsdd
