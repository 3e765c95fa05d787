#pragma once

#include <stdexcept>
#include <string>

namespace hedra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Coincident endpoints or otherwise unusable node positions.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Equilibrium system with no rows or no columns.
class EmptySystem : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

/// The load is not in the range of the equilibrium matrix.
class InfeasibleLoad : public Error {
 public:
  InfeasibleLoad(const std::string& what, double least_squares_residual)
      : Error(what), least_squares_residual_(least_squares_residual) {}
  double least_squares_residual() const { return least_squares_residual_; }

 private:
  double least_squares_residual_;
};

/// No force densities hold the pose with every cable at or above q_min.
class NotStaticallyFeasible : public Error {
 public:
  using Error::Error;
};

/// Force density at or above cable stiffness: rest length would be <= 0.
class SlackImpossible : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hedra
