#pragma once

#include <stdexcept>
#include <string>

namespace pcps {

// Shape or size mismatch between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside its admissible range (k, eps, delta, sample counts, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerically degenerate input: zero-rank matrix, vanishing residual,
// no admissible ridge split index, zero denominators.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pcps
