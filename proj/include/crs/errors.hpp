#pragma once

#include <stdexcept>
#include <string>

namespace crs {

// Malformed or inconsistent input. The CLI maps it to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid distribution or scheme parameter.
struct ParameterError : InputError {
    using InputError::InputError;
};

// Request outside what the implementation supports (size caps, graph class).
// The CLI maps it to exit code 2.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace crs
