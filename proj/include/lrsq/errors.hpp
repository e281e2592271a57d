#pragma once

#include <stdexcept>
#include <string>

namespace lrsq {

// Validation problems in user-supplied parameters, curves or config files.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Out-of-domain arguments to an otherwise valid operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Requested swap rate outside the attainable range of f(t, .).
class UnattainableRateError : public DomainError {
public:
    UnattainableRateError(const std::string& msg, double lo, double hi)
        : DomainError(msg), range_lo(lo), range_hi(hi) {}
    double range_lo;
    double range_hi;
};

// Real transform argument at or beyond the explosion threshold w_max.
class TransformExplosionError : public DomainError {
public:
    explicit TransformExplosionError(const std::string& msg) : DomainError(msg) {}
};

// Distribution collapses to a point mass (u == t), no density exists.
class DegenerateDistributionError : public DomainError {
public:
    explicit DegenerateDistributionError(const std::string& msg) : DomainError(msg) {}
};

// Operation requires constant sigma on the interval but the curve varies.
class UnsupportedConfigError : public std::logic_error {
public:
    explicit UnsupportedConfigError(const std::string& msg) : std::logic_error(msg) {}
};

// Numerical solver could not bracket or converge; carries diagnostics.
class SolverFailureError : public std::runtime_error {
public:
    SolverFailureError(const std::string& msg, int step, double residual_lo, double residual_hi)
        : std::runtime_error(msg), step_index(step), res_lo(residual_lo), res_hi(residual_hi) {}
    int step_index;
    double res_lo;
    double res_hi;
};

// State-space truncation too small (transition rows losing mass).
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Discount curve bootstrap cannot match a quote.
class InfeasibleCurveError : public std::runtime_error {
public:
    explicit InfeasibleCurveError(const std::string& msg) : std::runtime_error(msg) {}
};

// Swaption quote outside the attainable model price range.
class UnattainableQuoteError : public std::runtime_error {
public:
    explicit UnattainableQuoteError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lrsq
