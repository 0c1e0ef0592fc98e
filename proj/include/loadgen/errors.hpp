#pragma once

#include <stdexcept>
#include <string>

namespace loadgen {

/// Operand dimensions do not agree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced NaN or Inf.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data or configuration is unusable.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file on disk has the wrong format or version.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace loadgen
