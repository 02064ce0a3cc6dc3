#pragma once

#include <stdexcept>
#include <string>

namespace oscint {

/// Base class for all library errors so callers can catch the whole family.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonIncreasingExponents : Error {
    explicit NonIncreasingExponents(const std::string& msg = "exponents must be strictly increasing positive integers")
        : Error(msg) {}
};

struct ZeroCoefficient : Error {
    explicit ZeroCoefficient(const std::string& msg = "coefficients must be nonzero and finite")
        : Error(msg) {}
};

struct LinearTermPresent : Error {
    explicit LinearTermPresent(const std::string& msg = "exponent 1 is not allowed; absorb the linear term into the frequency shift")
        : Error(msg) {}
};

struct DegeneratePhase : Error {
    explicit DegeneratePhase(const std::string& msg = "operation requires at least one monomial")
        : Error(msg) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg = "monomial index out of range") : Error(msg) {}
};

struct EmptyWindow : Error {
    explicit EmptyWindow(const std::string& msg = "scale window is empty") : Error(msg) {}
};

struct ToleranceNotMet : Error {
    double achieved;
    explicit ToleranceNotMet(double achieved_err, const std::string& msg = "requested tolerance could not be certified")
        : Error(msg + " (achieved " + std::to_string(achieved_err) + ")"), achieved(achieved_err) {}
};

struct Overflow : Error {
    explicit Overflow(const std::string& msg = "floating-point overflow during evaluation") : Error(msg) {}
};

struct InsufficientPoints : Error {
    explicit InsufficientPoints(const std::string& msg = "not enough usable points for the fit") : Error(msg) {}
};

struct InvalidDimensions : Error {
    explicit InvalidDimensions(const std::string& msg = "ensemble dimensions are inconsistent") : Error(msg) {}
};

}
