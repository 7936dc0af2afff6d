#pragma once

#include <stdexcept>
#include <string>

namespace wzk {

// Precondition violation (bad degree, mismatched sizes, non-orthonormal input, ...).
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed external input (files, JSON, CLI parameters).
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structural validation failure (curvature symmetries, complex closure, ...).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure (non-convergence, underflow, divergent integral).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wzk
