#ifndef DFANO_ERRORS_HPP
#define DFANO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dfano
{
// Invalid physical parameters (nonpositive total width, exceptional point, ...).
class ParameterError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of the numerics on otherwise valid input. The CLI maps
// these to exit status 2.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A closed-form denominator came closer to zero than the pole threshold.
class PoleProximityError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

// The steady-state linear system is singular or too ill-conditioned.
class SingularSystemError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

// Time integration blew up; the step is too large for the fastest rate.
class StepSizeError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

// The time-domain spectrum did not settle before t_final.
class ConvergenceError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

// Malformed or invalid run configuration. The CLI maps these to exit status 1.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace dfano

#endif
