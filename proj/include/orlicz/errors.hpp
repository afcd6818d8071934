#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// M' is non-increasing somewhere on the probe grid, so M' cannot be inverted.
struct NotStrictlyConvex : Error {
    using Error::Error;
};

// Evaluation was requested outside the representable domain of a dual function.
struct DomainExceeded : Error {
    using Error::Error;
};

// A weight sequence violates a_1 >= a_2 >= ... >= a_n > 0.
struct NotDecreasing : Error {
    using Error::Error;
};

// Knot values coincide, so the piecewise-affine function has no inverse.
struct NotStrictlyIncreasing : Error {
    using Error::Error;
};

// H(s) - s*H'(s) fell below the strictness margin on the integration range.
struct DegenerateProfile : Error {
    using Error::Error;
};

// M(sqrt(t)) failed the strict concavity test on the probe grid.
struct NotTwoConcave : Error {
    using Error::Error;
};

// The dual function does not satisfy M*(1) = 1.
struct NotNormalized : Error {
    using Error::Error;
};

// Two containers that must agree in length do not.
struct LengthMismatch : Error {
    using Error::Error;
};

// Exact permutation enumeration was requested beyond the configured cutoff.
struct TooLargeForExact : Error {
    using Error::Error;
};

// A configuration document is malformed or violates a constraint.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace orlicz
