#pragma once

#include <stdexcept>
#include <string>

namespace magscatter {

/// Input rejected before any numerics ran (bad config, violated precondition).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed: divergence, non-convergence, insufficient decay.
/// `quantity` names the offending diagnostic and `value` carries its last value.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::string quantity, double value)
        : std::runtime_error(what), quantity_(std::move(quantity)), value_(value) {}

    const std::string& quantity() const noexcept { return quantity_; }
    double value() const noexcept { return value_; }

private:
    std::string quantity_;
    double value_;
};

}  // namespace magscatter
