#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace retrial {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution or model parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A function was evaluated outside its domain (negative transform argument, z > 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The model violates the ergodicity condition; carries the offending effective load.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double rho_eff) : Error(what), rho_eff_(rho_eff) {}
    double rho_eff() const noexcept { return rho_eff_; }

private:
    double rho_eff_;
};

/// Quadrature, linear solve or truncation failed to reach its tolerance.
class NumericError : public Error {
public:
    using Error::Error;
};

/// The requested engine cannot handle this model (e.g. CTMC oracle with non-exponential laws).
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid run configuration; `path` names the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace retrial
