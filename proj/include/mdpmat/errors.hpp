#pragma once

#include <stdexcept>

namespace mdpmat {

/// Structural validation failure: shape constraints or probability-simplex
/// constraints violated by an input.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix/vector dimensions do not agree.
class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A probability block has a negative entry or does not sum to one within
/// tolerance.
class SimplexViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// An input contains NaN or infinity where a finite value is required.
class NonFiniteInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A state or action index is outside the declared ranges.
class IndexOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A linear solve produced a non-finite or high-residual solution. Unreachable
/// for valid discounted inputs; signals corrupted data.
class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity that is nonnegative by construction came out negative beyond
/// rounding noise, or a similar internal contradiction was detected.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A document could not be parsed: malformed syntax, missing or unknown
/// fields, wrong field types.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An algorithm configuration value is out of its legal range.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace mdpmat
