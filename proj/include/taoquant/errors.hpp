#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace taoquant {

/// Base class for all taoquant errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate pool state or invalid trade size.
class PoolError : public Error {
public:
    using Error::Error;
};

/// Emission allocation has no defined result (e.g. all shares zero).
class AllocationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the source path and 1-based line number
/// (line 0 when the error is not tied to a specific line).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what), path_(), line_(0) {}

    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : Error(path + (line ? ":" + std::to_string(line) : "") + ": " + what),
          path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Bad run configuration: missing credentials, unwritable directory, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Semantically invalid data discovered after parsing.
class DataError : public Error {
public:
    using Error::Error;
};

/// Retryable transport failure that survived all retry attempts.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Regressor matrix is rank deficient; names the offending columns.
class SingularDesignError : public Error {
public:
    SingularDesignError(const std::string& what, std::vector<std::string> columns)
        : Error(what), columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::vector<std::string> columns_;
};

/// Too few observations for the requested estimator.
class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// A ratio statistic (Sharpe, Sortino, t) has a zero denominator.
class ZeroVarianceError : public Error {
public:
    using Error::Error;
};

}  // namespace taoquant
