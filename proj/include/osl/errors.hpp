#pragma once

#include <stdexcept>
#include <string>

namespace osl {

/// Inconsistent or out-of-range configuration values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vector or tensor length does not match the configured dimensions.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A call-order or argument precondition was violated by the caller.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed, truncated or mismatching on-disk data.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace osl
