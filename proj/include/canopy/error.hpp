#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace canopy {

/// Graph or matrix would exceed a size limit (integer overflow or dense cap).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Parameters outside an operation's domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested quantity does not exist for the given law (e.g. divergent moment).
class UnsupportedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Division by a (numerically) vanishing pivot in a Green-function recursion.
class SingularEnergyError : public std::runtime_error {
 public:
  SingularEnergyError(std::size_t vertex, const std::string& what)
      : std::runtime_error(what), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

/// An iterative procedure ran out of its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace canopy
