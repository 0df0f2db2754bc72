#pragma once

#include <stdexcept>
#include <string>

namespace optdes {

// Input outside the admissible domain (box, cone, orbit index, schema).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace optdes
