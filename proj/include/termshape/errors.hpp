#pragma once

#include <stdexcept>
#include <string>

namespace termshape {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root finder was given a bracket without a sign change.
struct BracketingError : Error {
    using Error::Error;
};

/// Evaluation produced a non-finite value where a finite one is required.
struct NumericalError : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// Parameter vector violates a construction invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Operation requested for the wrong curve family (e.g. gamma coordinates
/// of a Nelson-Siegel vector).
struct FamilyError : Error {
    using Error::Error;
};

/// tau1 == tau2 with beta3 != 0: the four-function system degenerates.
struct DegenerateFamilyError : Error {
    using Error::Error;
};

/// Malformed call arguments (grid sizes, counts, ...).
struct ArgumentError : Error {
    using Error::Error;
};

/// Dynamics constraints violated (beta3 must be positive).
struct ConsistencyError : Error {
    using Error::Error;
};

/// Input data does not match the declared schema.
struct SchemaError : Error {
    using Error::Error;
};

/// Underlying stream or file could not be read.
struct IoError : Error {
    using Error::Error;
};

/// Internal invariant broken; indicates a bug, not bad input.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace termshape
