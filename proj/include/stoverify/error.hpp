#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stoverify {

// Base of every error the toolkit raises. Input problems derive from
// InputError so the CLI can map them to a single exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public InputError {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : InputError(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnsupportedOperator : public InputError {
public:
    using InputError::InputError;
};

class UnknownProposition : public InputError {
public:
    using InputError::InputError;
};

class AlphabetTooLarge : public InputError {
public:
    using InputError::InputError;
};

class RunTooShort : public Error {
public:
    using Error::Error;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class UnboundedRegion : public InputError {
public:
    using InputError::InputError;
};

class OverlappingRegions : public InputError {
public:
    using InputError::InputError;
};

class BadRateMatrix : public InputError {
public:
    using InputError::InputError;
};

class OutOfStateSpace : public Error {
public:
    using Error::Error;
};

class MissingMode : public Error {
public:
    using Error::Error;
};

class MissingRates : public InputError {
public:
    using InputError::InputError;
};

class StepTooLarge : public InputError {
public:
    using InputError::InputError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace stoverify
