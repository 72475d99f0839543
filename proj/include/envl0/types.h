#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>

namespace envl0 {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes disagree with the operator they are passed to.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A parameter is outside the domain an operation is defined on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Non-finite values, failed factorizations, violated runtime invariants.
class NumericalError : public Error {
public:
  using Error::Error;
};

inline void require_size(Index actual, Index expected, const char *what) {
  if (actual != expected)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
}

} // namespace envl0
