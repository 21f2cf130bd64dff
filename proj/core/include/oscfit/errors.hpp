#pragma once

#include <stdexcept>

namespace oscfit {

// Malformed or inconsistent input data (CSV parse failures, bad windows,
// degenerate series). CLI maps this to exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (resonance, non-convergence). CLI maps this to exit
// code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace oscfit
