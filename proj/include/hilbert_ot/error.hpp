#pragma once

#include <stdexcept>
#include <string>

namespace hilbert_ot {

/// Malformed or inconsistent input data (shape mismatch, bad weights, NaN).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter outside its admissible range (d*k > 128, q > d, p < 1, ...).
class ParameterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hilbert_ot
