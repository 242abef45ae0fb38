#pragma once

#include <stdexcept>
#include <string>

namespace tdm {

/// Structural problem in an input file (bad JSON, missing required key).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A record parsed fine but violates a data-model invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model fitting cannot proceed (e.g. a phase or class with no examples).
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tdm
