#pragma once

#include <stdexcept>
#include <string>

namespace waveleton {

// Base for all library errors. Subcommands map ValidationError -> exit 1,
// IoError -> exit 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments, shapes, or parameter ranges.
struct ValidationError : Error {
    using Error::Error;
};

struct UnsupportedOrder : ValidationError {
    using ValidationError::ValidationError;
};
struct ConstructionFailure : Error {
    using Error::Error;
};
struct BadLength : ValidationError {
    using ValidationError::ValidationError;
};
struct TooManyLevels : ValidationError {
    using ValidationError::ValidationError;
};
struct BadParams : ValidationError {
    using ValidationError::ValidationError;
};
struct LevelOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct InsufficientRegularity : ValidationError {
    using ValidationError::ValidationError;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct BadShape : ValidationError {
    using ValidationError::ValidationError;
};
struct IndexOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};
struct NotNormalized : ValidationError {
    using ValidationError::ValidationError;
};
struct UnsupportedNonlinearity : ValidationError {
    using ValidationError::ValidationError;
};
struct BadSpec : ValidationError {
    using ValidationError::ValidationError;
};
struct ZeroField : ValidationError {
    using ValidationError::ValidationError;
};
struct BadGrid : ValidationError {
    using ValidationError::ValidationError;
};
struct BadNorm : ValidationError {
    using ValidationError::ValidationError;
};
struct CflViolation : ValidationError {
    using ValidationError::ValidationError;
};
struct SolverDivergence : Error {
    using Error::Error;
};
struct ShapeMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct UnknownKey : ValidationError {
    using ValidationError::ValidationError;
};
struct BadValue : ValidationError {
    using ValidationError::ValidationError;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace waveleton
