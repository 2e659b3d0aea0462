#ifndef ELASTOROUGH_ERRORS_HPP
#define ELASTOROUGH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace elastorough
{

// Invalid physical parameters, geometry, or configuration values.
class ConstraintViolation : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or incomplete configuration input.
class ConfigError : public ConstraintViolation
{
public:
  using ConstraintViolation::ConstraintViolation;
};

// A numerical procedure could not produce a result (singular block, Krylov stall,
// degenerate mapping).
class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SingularTransform : public NumericalFailure
{
public:
  using NumericalFailure::NumericalFailure;
};

class NonConvergence : public NumericalFailure
{
public:
  NonConvergence(const std::string &what, double final_residual, int iterations)
    : NumericalFailure(what), residual(final_residual), iterations(iterations)
  {
  }
  double residual;
  int iterations;
};

// A post-solve diagnostic detected a broken identity or inequality.
class InvariantViolation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class UnsupportedConfiguration : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace elastorough

#endif  // ELASTOROUGH_ERRORS_HPP
