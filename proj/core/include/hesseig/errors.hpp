#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace hesseig {

/// Root of the library's exception hierarchy. `kind()` is the stable,
/// machine-readable tag written into CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Out-of-range or inconsistent input parameters.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

/// A spectrum or matrix was required to lie in a Garding cone and does not.
class ConeError : public Error {
public:
    explicit ConeError(const std::string& what) : Error("cone", what) {}
};

/// An iterative method failed to converge. `residual` is the last measured
/// residual (NaN when not applicable).
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double residual = std::numeric_limits<double>::quiet_NaN())
        : Error("numerical", what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A root or eigenvalue bracket could not be established.
class BracketError : public Error {
public:
    explicit BracketError(const std::string& what) : Error("bracket", what) {}
};

/// Input that makes the requested quantity undefined (zero field, 0/0).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error("degenerate", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace hesseig
