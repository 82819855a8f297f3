#pragma once

#include <stdexcept>
#include <string>

namespace boseglow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or numerics parameter is outside its domain.
class InvalidParameter : public Error {
public:
    InvalidParameter(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Inclusive quantity requested at or above the critical multiplicity n_c.
class DivergentMean : public Error {
public:
    using Error::Error;
};

/// A series did not reach its tolerance within the configured maximum order.
class TruncationLimit : public Error {
public:
    using Error::Error;
};

/// ω_n underflowed even in log space.
class UnderflowRegime : public Error {
public:
    using Error::Error;
};

class InvalidOrder : public Error {
public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

/// Side/out decomposition requested at K = 0.
class ZeroMeanMomentum : public Error {
public:
    using Error::Error;
};

/// Gaussian composition produced a non-integrable quadratic form.
class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

class SizeLimit : public Error {
public:
    using Error::Error;
};

class SeedRequired : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace boseglow
