// errors.hpp: exception types thrown by the spinbath library

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinbath {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An amplitude pair failed |x|^2 + |y|^2 = 1.
class NormalizationError : public Error {
public:
    NormalizationError(std::string which, double residual);
    const std::string& which() const noexcept { return which_; }
    double residual() const noexcept { return residual_; }

private:
    std::string which_;
    double residual_;
};

class EmptyEnvironmentError : public Error {
public:
    EmptyEnvironmentError() : Error("spin-bath model needs at least one environment spin") {}
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(std::size_t expected, std::size_t actual);
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration was requested above the configured cap.
class CapExceededError : public Error {
public:
    CapExceededError(std::size_t n_spins, std::size_t cap, double required_bytes);
    std::size_t n_spins() const noexcept { return n_spins_; }
    std::size_t cap() const noexcept { return cap_; }
    double required_bytes() const noexcept { return required_bytes_; }

private:
    std::size_t n_spins_;
    std::size_t cap_;
    double required_bytes_;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// A point set has no spread (all points coincide).
class DegenerateSetError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or model document. `field_path()` points at the offending field,
/// e.g. `model.spins[2].alpha`.
class ConfigError : public Error {
public:
    ConfigError(std::string field_path, const std::string& message);
    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace spinbath
