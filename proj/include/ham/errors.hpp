#pragma once

#include <stdexcept>
#include <string>

namespace ham {

/// Raised when a lookback window holds fewer points than a computation needs.
class InsufficientHistory : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A behavioral break or generator specification outside its admissible range.
class InvalidSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A run/experiment configuration that violates its invariants.
class InvalidConfig : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Too few observations for a statistic.
class InsufficientSample : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Zero-variance sample where a standardized moment is required.
class DegenerateSample : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input data; carries the 1-based line number when known.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, long line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    [[nodiscard]] long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace ham
