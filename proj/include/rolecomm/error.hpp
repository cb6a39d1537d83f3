#pragma once

#include <stdexcept>
#include <string>

namespace rolecomm {

/// Malformed input text (edge lists, node files, intermediate CSVs).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or parameter combinations.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative numerics that failed to converge, or inputs that break a
/// numerical precondition (e.g. a disconnected similarity network).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rolecomm
