#pragma once

#include <stdexcept>
#include <string>

namespace dmfbm {

/// Error categories double as CLI exit codes.
enum class ErrorCategory : int {
    domain = 2,
    convergence = 3,
    consistency = 4,
    singular_matrix = 5,
    grid_mismatch = 6,
    io = 7,
    embedding = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& what) : Error(ErrorCategory::convergence, what) {}
};

struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& what) : Error(ErrorCategory::consistency, what) {}
};

struct SingularMatrixError : Error {
    explicit SingularMatrixError(const std::string& what) : Error(ErrorCategory::singular_matrix, what) {}
};

struct GridMismatchError : Error {
    explicit GridMismatchError(const std::string& what) : Error(ErrorCategory::grid_mismatch, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

struct EmbeddingError : Error {
    explicit EmbeddingError(const std::string& what) : Error(ErrorCategory::embedding, what) {}
};

/// Short lowercase name of a category.
inline const char* category_name(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::domain: return "domain";
        case ErrorCategory::convergence: return "convergence";
        case ErrorCategory::consistency: return "consistency";
        case ErrorCategory::singular_matrix: return "singular-matrix";
        case ErrorCategory::grid_mismatch: return "grid-mismatch";
        case ErrorCategory::io: return "io";
        case ErrorCategory::embedding: return "embedding";
    }
    return "unknown";
}

}  // namespace dmfbm
