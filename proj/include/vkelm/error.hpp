#pragma once

#include <stdexcept>
#include <string>

namespace vkelm {

// Base for every recoverable failure raised by the library. Contract
// violations (dimension mismatches, empty inputs where the caller promised
// otherwise) are reported as std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or insufficient user input: empty files, unusable split sizes.
class InputError : public Error {
public:
    using Error::Error;
};

// A required CSV column is missing.
class SchemaError : public InputError {
public:
    SchemaError(const std::string& column)
        : InputError("missing required column '" + column + "'"), column_(column) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

// Preprocessing statistics cannot be computed.
class FitError : public Error {
public:
    using Error::Error;
};

// A factorization failed even after diagonal jitter escalation.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double last_jitter)
        : Error(what), last_jitter_(last_jitter) {}

    double last_jitter() const noexcept { return last_jitter_; }

private:
    double last_jitter_;
};

// A metric is mathematically undefined for the given data (e.g. R² on a
// constant target).
class MetricError : public Error {
public:
    using Error::Error;
};

// Malformed serialized content (model files, reports).
class FormatError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersionError : public FormatError {
public:
    explicit UnsupportedVersionError(long long version)
        : FormatError("unsupported format_version " + std::to_string(version)),
          version_(version) {}

    long long version() const noexcept { return version_; }

private:
    long long version_;
};

// Every cell of a hyperparameter search failed.
class SearchError : public Error {
public:
    using Error::Error;
};

}  // namespace vkelm
