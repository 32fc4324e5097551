#pragma once

#include <stdexcept>
#include <string>

namespace dyncause {

// Base type for everything this library throws on purpose. Callers that
// want blanket handling catch this; tests catch the concrete types.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Log transform hit a value <= 0.
struct NonPositiveValue : Error {
    long row = -1;
    long column = -1;
    NonPositiveValue(long r, long c, double v)
        : Error("non-positive value " + std::to_string(v) + " at row " + std::to_string(r) +
                ", column " + std::to_string(c) + "; natural log requires strictly positive data"),
          row(r), column(c) {}
};

// Sample too short for the requested operation.
struct InsufficientObservations : Error {
    InsufficientObservations(const std::string& what_for, long have, long need)
        : Error(what_for + ": have " + std::to_string(have) + " observations, need at least " +
                std::to_string(need)) {}
};

// Regressor Gram matrix numerically rank-deficient.
struct SingularDesign : Error {
    explicit SingularDesign(const std::string& detail)
        : Error("singular regressor design: " + detail) {}
};

// Residual covariance not positive definite where an inverse is required.
struct SingularCovariance : Error {
    explicit SingularCovariance(const std::string& detail)
        : Error("singular residual covariance: " + detail) {}
};

// Hat-matrix diagonal outside [0, 1); the leverage adjustment is undefined.
struct LeverageOutOfRange : Error {
    explicit LeverageOutOfRange(double h)
        : Error("leverage " + std::to_string(h) + " outside [0, 1)") {}
};

// More than the tolerated share of bootstrap replications failed to estimate.
struct TooManySingularReplications : Error {
    TooManySingularReplications(long failed, long total)
        : Error("bootstrap: " + std::to_string(failed) + " of " + std::to_string(total) +
                " replications had a singular design (limit is 1%)") {}
};

// Minimum window larger than the available sample.
struct WindowExceedsSample : Error {
    WindowExceedsSample(long window, long sample)
        : Error("window size " + std::to_string(window) + " exceeds sample length " +
                std::to_string(sample)) {}
};

// Bootstrap critical value <= 0 while the observed statistic is positive.
struct NonPositiveCriticalValue : Error {
    explicit NonPositiveCriticalValue(double cv)
        : Error("bootstrap critical value " + std::to_string(cv) +
                " is not positive; ratio undefined") {}
};

// Malformed input text (CSV or config).
struct ParseError : Error {
    long line = -1;
    long column = -1;
    ParseError(const std::string& detail, long ln, long col)
        : Error("parse error at line " + std::to_string(ln) + ", column " + std::to_string(col) +
                ": " + detail),
          line(ln), column(col) {}
};

// Date column not strictly increasing.
struct NonMonotonicDates : Error {
    NonMonotonicDates(const std::string& a, const std::string& b, long row)
        : Error("dates not strictly increasing: '" + a + "' then '" + b + "' at row " +
                std::to_string(row)) {}
};

// Empty or non-numeric cell where a number is required.
struct MissingValue : Error {
    long row = -1;
    long column = -1;
    MissingValue(long r, long c)
        : Error("missing value at row " + std::to_string(r) + ", column " + std::to_string(c)),
          row(r), column(c) {}
};

} // namespace dyncause
