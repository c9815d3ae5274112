#pragma once

#include <stdexcept>
#include <string>

namespace dwell {

// Bad input: violated precondition or malformed specification.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical method failed to deliver the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace dwell
