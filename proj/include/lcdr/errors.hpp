#ifndef LCDR_ERRORS_HPP
#define LCDR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lcdr {

/// Invalid argument or violated precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File or serialization failure (missing file, bad magic, truncation).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A synthesized scenario failed its relay-consistency check.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value inside a numeric kernel.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate data: zero-variance channel, infeasible sampling, empty class.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration problems.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lcdr

#endif
