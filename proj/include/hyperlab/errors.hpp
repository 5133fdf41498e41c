#pragma once

#include <stdexcept>
#include <string>

namespace hyperlab {

/// Rejected input: parameters outside the admissible range of an operation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not produce a trustworthy number
/// (divergence, quadrature non-convergence, exhausted step budget).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition)
        throw ValidationError(message);
}

} // namespace hyperlab
