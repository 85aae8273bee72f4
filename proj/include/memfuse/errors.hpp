#pragma once

#include <stdexcept>
#include <string>

namespace memfuse {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bracketing solver failed to reach its residual target.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV / JSON input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace memfuse
