// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace streamcc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, zero norms, diverging losses.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A sample whose feature vector would have zero norm. Curation rejects it
/// and leaves the memory untouched.
class ZeroFeatureError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Argument outside its admissible range (k >= n, probabilities outside [0,1], ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the byte offset at which parsing failed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace log {

using Sink = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: stderr). Returns the previous one.
Sink set_warning_sink(Sink sink);

void warn(const std::string& message);

}  // namespace log

}  // namespace streamcc
