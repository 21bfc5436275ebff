#pragma once

#include <stdexcept>
#include <string>

namespace nshoot {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (bad interval, t out of range, ...).
struct domain_error : error {
    using error::error;
};

// Weight has no admissible positive/negative/positive hump pattern at all
// (e.g. it never changes sign).
struct sign_structure_error : error {
    using error::error;
};

// Weight changes sign but not in the single-negative-hump pattern we handle.
struct unsupported_structure_error : error {
    using error::error;
};

// A threshold formula has an empty feasibility window or a zero denominator.
struct infeasible_error : error {
    using error::error;
};

// Nonfinite state during integration or a diverging iteration.
struct numerical_error : error {
    using error::error;
};

// Malformed input file / JSON that does not match the documented schema.
struct schema_error : error {
    using error::error;
};

} // namespace nshoot
