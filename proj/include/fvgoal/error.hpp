#pragma once

#include <stdexcept>
#include <string>

namespace fvgoal {

/// Base for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

/// A point or region lies outside the space-time domain.
struct OutOfDomain : Error {
    using Error::Error;
};

/// Explicit scheme would be unstable on the requested grid/time step.
struct CflViolation : Error {
    using Error::Error;
};

/// NaN/Inf produced, or some other breakdown of a numerical routine.
struct NumericalFailure : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

namespace detail {
inline void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidArgument(what);
}
}  // namespace detail

}  // namespace fvgoal
