#pragma once

#include <stdexcept>
#include <string>

namespace mkdv {

/// Category of a numerical breakdown. Precondition violations are reported
/// separately as std::invalid_argument.
enum class Breakdown {
    Overflow,        ///< an exponent or product left the floating range
    IllConditioned,  ///< condition estimate above the configured threshold
    NotPositiveDefinite,
    Singular,
    RegimeTooEarly,  ///< conjugated matrix is not dominated by its limit
    NonConvergence,  ///< quadrature refinement moved the result too much
    UnderResolved,   ///< sampling too coarse for the requested quantity
    BlowUp,          ///< integrator produced non-finite values
};

const char* to_string(Breakdown kind) noexcept;

/// Thrown when a computation cannot deliver a trustworthy result.
/// `diagnostic` carries the offending measurement (condition estimate,
/// relative change, exponent, ...) so callers can report it.
class NumericalError : public std::runtime_error {
public:
    NumericalError(Breakdown kind, const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), kind_(kind), diagnostic_(diagnostic) {}

    Breakdown kind() const noexcept { return kind_; }
    double diagnostic() const noexcept { return diagnostic_; }

private:
    Breakdown kind_;
    double diagnostic_;
};

}  // namespace mkdv
