#pragma once

#include <stdexcept>
#include <string>

namespace asymsim {

// Base class for everything thrown on purpose by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input artifacts: DAG files, platform files, run configs.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a model constraint
// (unknown cluster, missing per-kind speed, bad threshold, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Failures during simulation or while writing outputs.
class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace asymsim
