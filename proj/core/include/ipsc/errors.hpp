#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipsc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad arguments or malformed input data.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

/// Corrupt or truncated bitstream; carries the byte offset where parsing failed.
class DecodeError : public Error {
public:
    DecodeError(const std::string& msg, std::size_t byte_offset)
        : Error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset(byte_offset) {}
    std::size_t byte_offset;
};

/// A requested operation needs a capability the object does not provide.
class CapabilityError : public Error {
public:
    explicit CapabilityError(const std::string& msg) : Error(msg) {}
};

/// NaN/Inf or other numerical breakdown; carries sampler diagnostics.
class NumericalError : public Error {
public:
    NumericalError(const std::string& msg, int step, double sigma)
        : Error(msg + " (step " + std::to_string(step) + ", sigma " + std::to_string(sigma) + ")"),
          step(step), sigma(sigma) {}
    int step;
    double sigma;
};

/// Metric undefined for the given inputs (e.g. zero reference).
class MetricError : public Error {
public:
    explicit MetricError(const std::string& msg) : Error(msg) {}
};

/// Config file could not be parsed; carries the offending line number.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

}  // namespace ipsc
