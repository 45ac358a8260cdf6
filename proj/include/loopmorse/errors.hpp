#pragma once

#include <stdexcept>
#include <string>

namespace loopmorse {

// Sampled lift is inconsistent: non-integer period gap, ambiguous winding,
// or a mismatch between stored and recomputed winding.
struct malformed_lift_error : std::runtime_error {
    explicit malformed_lift_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation requires a specific torus dimension (the pendulum constructions
// are one-dimensional).
struct unsupported_dimension_error : std::invalid_argument {
    explicit unsupported_dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// Chain complex fails validation (shape mismatch or d*d != 0).
struct invalid_complex_error : std::runtime_error {
    explicit invalid_complex_error(const std::string& what) : std::runtime_error(what) {}
};

// A crossing with a degenerate form, or an identically singular span, was
// found where the crossing-sum method needs regular crossings.
struct non_regular_path_error : std::runtime_error {
    explicit non_regular_path_error(const std::string& what) : std::runtime_error(what) {}
};

// Time stepping produced non-finite values.
struct instability_error : std::runtime_error {
    explicit instability_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace loopmorse
