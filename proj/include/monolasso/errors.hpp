#pragma once

#include <stdexcept>
#include <string>

namespace monolasso {

/// Broad error categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorCategory {
    config = 2,
    data = 3,
    solver = 4,
    consistency = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

struct SolverError : Error {
    explicit SolverError(const std::string& what) : Error(ErrorCategory::solver, what) {}
};

/// A column of an active design is (numerically) a combination of the others.
struct DegenerateDesignError : SolverError {
    DegenerateDesignError(long column, const std::string& what)
        : SolverError(what), column(column) {}
    long column;
};

struct SolverStallError : SolverError {
    using SolverError::SolverError;
};

/// Logistic curvature collapsed (some W_ii ~ 0); retry with a smaller step.
struct CurvatureError : SolverError {
    using SolverError::SolverError;
};

struct StepSizeError : SolverError {
    using SolverError::SolverError;
};

struct ZeroVarianceError : DataError {
    ZeroVarianceError(long column, const std::string& what) : DataError(what), column(column) {}
    long column;
};

struct ParseError : DataError {
    ParseError(long line, const std::string& what) : DataError(what), line(line) {}
    long line;
};

struct RangeError : ConfigError {
    using ConfigError::ConfigError;
};

/// Internal invariant broken at runtime (e.g. no positive step length exists).
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& what)
        : Error(ErrorCategory::consistency, what) {}
};

}  // namespace monolasso
