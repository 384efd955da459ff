#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evoblock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A precondition on a parameter was violated (bad index, alpha above the
/// resolvent bound, malformed generator parameters, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative method ran out of iterations. The last iterate is kept so
/// callers can inspect or reuse it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double last_estimate = 0.0)
        : Error(what), last_iterate_(std::move(last_iterate)), last_estimate_(last_estimate) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double last_estimate() const noexcept { return last_estimate_; }

private:
    std::vector<double> last_iterate_;
    double last_estimate_;
};

/// The block Lanczos recurrence hit a rank-deficient coupling block. The
/// linear-system back ends remain usable for the same quantity.
class BreakdownError : public Error {
public:
    using Error::Error;
};

/// Overflow, singular systems and other floating-point failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace evoblock
