#pragma once

#include <stdexcept>

namespace fhfm {

// Invalid shapes, ranks, labels or configuration values.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or insufficient input data (parsing, missing values, short series).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Required (age, year) cells absent from a mortality surface.
struct CoverageError : DataError {
    using DataError::DataError;
};

// Non-finite values, degenerate spectra or failed numerical routines.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative routine hit its iteration cap before meeting tolerance.
struct ConvergenceError : NumericError {
    using NumericError::NumericError;
};

} // namespace fhfm
