#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hiertopo {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid scalar parameter (negative scale, p < 1, bad spec field, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Input array has an unusable shape (too few patches, degenerate grid, ...).
class ShapeError : public Error {
public:
    using Error::Error;
};

// Two objects that must agree on a dimension do not.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A value violates a type invariant (NaN entry, asymmetric affinity, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A numeric construction collapsed: zero kernel scale, zero row sum, zero norm.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Malformed or unreadable file.
class IoError : public Error {
public:
    using Error::Error;
};

// Pipeline failure tagged with the stage, dataset and (optionally) simplex.
class StageError : public Error {
public:
    StageError(std::string stage, std::string dataset, const std::string& what)
        : Error("[" + stage + "] dataset '" + dataset + "': " + what),
          stage_(std::move(stage)),
          dataset_(std::move(dataset)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& dataset() const noexcept { return dataset_; }

private:
    std::string stage_;
    std::string dataset_;
};

}  // namespace hiertopo
