// errors.hpp - exception types shared by all modules
#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace nmqrt {

// Bad user input: dimensions, ranges, malformed configuration.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Quadrature or integrator did not reach the requested accuracy.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what,
                              double estimate = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

} // namespace nmqrt
