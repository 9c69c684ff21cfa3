#pragma once

#include <stdexcept>
#include <string>

namespace etsmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 1 + x2/gamma collapsed to zero: the Arrhenius exponent is undefined.
class SingularExponentError : public Error {
public:
    using Error::Error;
};

/// A parameter record violates one of its invariants.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// The integrator produced NaN or infinity.
class NonfiniteStateError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid configuration file. `line()` is 0 when the
/// problem is not tied to a specific line (e.g. a cross-key check).
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace etsmc
