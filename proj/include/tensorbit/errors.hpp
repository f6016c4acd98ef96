#pragma once

#include <stdexcept>
#include <string>

namespace tensorbit {

// Argument errors use std::invalid_argument, inapplicable inputs use
// std::domain_error. Iterative kernels that hit their cap throw this.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int iterations)
        : std::runtime_error(what), iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

// Requested slab of a pencil quotient is (numerically) singular.
class SingularSlabError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace tensorbit
