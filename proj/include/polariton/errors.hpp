#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

// Every failure raised by the library derives from Error so callers (sweeps,
// the CLI) can record it per point without aborting.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error { using Error::Error; };
class OutOfRange : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class TruncationError : public Error { using Error::Error; };

class NonUniqueSteadyState : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class IntegrationError : public Error { using Error::Error; };

class UndefinedCorrelation : public Error { using Error::Error; };
class ClassificationError : public Error { using Error::Error; };
class InsufficientData : public Error { using Error::Error; };

class ResonanceSingularity : public Error { using Error::Error; };

class ConfigError : public Error { using Error::Error; };

} // namespace polariton
