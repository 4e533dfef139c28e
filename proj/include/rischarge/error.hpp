#pragma once

#include <stdexcept>
#include <string>

namespace rischarge {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the function.
class DomainError : public Error {
public:
    using Error::Error;
};

class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

// A numerical method did not reach its accuracy target. Carries the method
// that was attempted and the residual estimate at the point of failure.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string method, double residual, const std::string& what)
        : Error(what + " [method=" + method + ", residual=" + std::to_string(residual) + "]"),
          method_(std::move(method)),
          residual_(residual) {}

    const std::string& method() const noexcept { return method_; }
    double residual() const noexcept { return residual_; }

private:
    std::string method_;
    double residual_;
};

// Moments that fall outside the reach of the Meijer-G approximant family.
class IllConditioned : public Error {
public:
    using Error::Error;
};

// Malformed configuration text or an invalid option combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A BRT moment whose defining integral diverges.
class MomentUndefined : public Error {
public:
    MomentUndefined(int order, const std::string& why)
        : Error("moment of order " + std::to_string(order) + " is undefined: " + why), order_(order) {}

    int order() const noexcept { return order_; }

private:
    int order_;
};

} // namespace rischarge
