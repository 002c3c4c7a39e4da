#pragma once

#include <stdexcept>
#include <string>

namespace qsdr {

// Base of every library error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad options, grids or keys (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Unusable or missing input data (CLI exit code 3).
struct DataError : Error {
    using Error::Error;
};

// Estimation failed numerically (CLI exit code 4).
struct NumericalError : Error {
    using Error::Error;
};

struct EmptyGrid : ConfigError {
    EmptyGrid() : ConfigError("bandwidth grid is empty") {}
};

struct FileNotFound : DataError {
    explicit FileNotFound(const std::string& path) : DataError("file not found: " + path) {}
};

struct MissingColumn : DataError {
    explicit MissingColumn(const std::string& name) : DataError("column not found: " + name) {}
};

struct NoNumericData : DataError {
    using DataError::DataError;
};

struct EmptyAfterFiltering : DataError {
    using DataError::DataError;
};

// Sample too small for the requested fit (n <= s(A) or similar).
struct InsufficientData : DataError {
    using DataError::DataError;
};

struct TooFewSlices : DataError {
    using DataError::DataError;
};

// A single local window has fewer than s(A) positively weighted samples.
struct InsufficientLocalData : NumericalError {
    using NumericalError::NumericalError;
};

struct OrderTooLow : NumericalError {
    OrderTooLow() : NumericalError("gradient extraction requires polynomial order k >= 1") {}
};

struct NoValidGradients : NumericalError {
    using NumericalError::NumericalError;
};

struct AllWeightsZero : NumericalError {
    AllWeightsZero() : NumericalError("every quantile level received weight zero") {}
};

struct NotSymmetric : NumericalError {
    using NumericalError::NumericalError;
};

struct RankDeficient : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateCovariance : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace qsdr
