#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace podag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument: index out of range, malformed set, bad parameter.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid generator or algorithm configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Too few samples for the requested statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Data that cannot support the requested statistic (constant column, NaN).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// A conditioning covariance block is numerically singular.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Labels in two inputs disagree (dataset vs layering, unknown node names).
class LabelMismatchError : public Error {
public:
    using Error::Error;
};

/// Parse failure in one of the text formats.
class FormatError : public Error {
public:
    using Error::Error;
};

/// No admissible tuning value (every candidate fit failed).
class SelectionError : public Error {
public:
    using Error::Error;
};

/// An edge was forced in both directions during orientation.
class InconsistencyError : public Error {
public:
    InconsistencyError(const std::string& what, int a, int b)
        : Error(what), pair_(a, b) {}

    std::pair<int, int> pair() const { return pair_; }

private:
    std::pair<int, int> pair_;
};

}  // namespace podag
