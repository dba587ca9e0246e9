#pragma once

#include <stdexcept>
#include <string>

namespace fbdp {

/// Thrown when no Lagrange multiplier in the search bracket meets the
/// energy budget (typically the amplitude bound or grid range is too small).
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when density propagation loses or gains probability mass
/// beyond the accepted drift.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Policy-file syntax or consistency error; carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

}  // namespace fbdp
