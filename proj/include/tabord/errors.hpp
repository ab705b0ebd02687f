#pragma once

#include <stdexcept>
#include <string>

namespace tabord {

// Error categories map to CLI exit codes: io -> 2, validation -> 3, numeric -> 4.
enum class ErrorKind { io, validation, numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct FileNotFoundError : Error {
    explicit FileNotFoundError(const std::string& path)
        : Error(ErrorKind::io, "file not found: " + path) {}
};

struct ParseError : Error {
    ParseError(std::size_t row, std::size_t col, const std::string& what)
        : Error(ErrorKind::validation,
                "parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": " + what),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

struct UnknownLabelColumnError : Error {
    explicit UnknownLabelColumnError(const std::string& name)
        : Error(ErrorKind::validation, "unknown label column: " + name) {}
};

struct EmptyDatasetError : Error {
    EmptyDatasetError() : Error(ErrorKind::validation, "dataset is empty") {}
};

struct InvalidCorrelationError : Error {
    explicit InvalidCorrelationError(double rho)
        : Error(ErrorKind::validation,
                "intra-block correlation must lie in [0,1): " + std::to_string(rho)) {}
};

struct DegenerateMatrixError : Error {
    DegenerateMatrixError()
        : Error(ErrorKind::numeric, "matrix is all-zero after standardization") {}
};

struct InvalidThresholdError : Error {
    explicit InvalidThresholdError(double t)
        : Error(ErrorKind::validation,
                "variance threshold must lie in (0,1]: " + std::to_string(t)) {}
};

struct TooManyClustersError : Error {
    TooManyClustersError(int k, int n)
        : Error(ErrorKind::validation,
                "cluster count " + std::to_string(k) + " exceeds sample count " +
                    std::to_string(n)) {}
};

struct LengthMismatchError : Error {
    LengthMismatchError(std::size_t a, std::size_t b)
        : Error(ErrorKind::validation,
                "vector length mismatch: " + std::to_string(a) + " vs " +
                    std::to_string(b)) {}
};

struct EmptyClusterError : Error {
    explicit EmptyClusterError(int id)
        : Error(ErrorKind::validation, "cluster " + std::to_string(id) + " is empty") {}
};

struct NotAPermutationError : Error {
    NotAPermutationError()
        : Error(ErrorKind::validation, "ordering is not a permutation of the features") {}
};

struct InconsistentFeatureSetsError : Error {
    InconsistentFeatureSetsError()
        : Error(ErrorKind::validation, "local orderings cover different feature sets") {}
};

struct ShapeMismatchError : Error {
    explicit ShapeMismatchError(const std::string& what)
        : Error(ErrorKind::validation, "shape mismatch: " + what) {}
};

struct InvalidWindowError : Error {
    InvalidWindowError(int window, int m)
        : Error(ErrorKind::validation,
                "attention window " + std::to_string(window) +
                    " out of range [1," + std::to_string(m) + "]") {}
};

struct TooFewFeaturesError : Error {
    explicit TooFewFeaturesError(int m)
        : Error(ErrorKind::validation,
                "need at least 2 features, got " + std::to_string(m)) {}
};

struct InvalidLambdasError : Error {
    explicit InvalidLambdasError(const std::string& what)
        : Error(ErrorKind::validation, "invalid loss weights: " + what) {}
};

struct UnlabeledDataError : Error {
    UnlabeledDataError()
        : Error(ErrorKind::validation, "training requires a labeled dataset") {}
};

}  // namespace tabord
