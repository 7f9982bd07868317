#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sde1d/expr.hpp"

namespace sde1d {

/// Raised when an operation's preconditions on a DiffusionSpec are not met.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Interpretation { Ito, Stratonovich };

std::string to_string(Interpretation interp);
Interpretation interpretation_from_string(const std::string& s);

/// Closed state-space interval [a, b]; b may be +infinity.
struct Interval {
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();

    bool b_finite() const { return std::isfinite(b); }
    double width() const { return b - a; }
};

/// The SDE dX = f(X) dt + sqrt(2 g(X)) dW on [a, b], read either in the
/// Ito or the Stratonovich sense. g carries the squared diffusion / 2
/// convention (units of state^2/time), f units of state/time.
struct DiffusionSpec {
    Expr f;
    Expr g;
    Interval domain;
    Interpretation interpretation = Interpretation::Ito;
};

/// One finite endpoint where g vanishes (the degenerate set Z).
struct EndpointCheck {
    double endpoint = 0.0;
    double g_value = 0.0;
    double gprime = 0.0;        // symbolic g' evaluated at the endpoint
    bool gprime_nonzero = false;
    double f_value = 0.0;
    bool compatible = false;    // f(a) >= 0 at left, f(b) <= 0 at right
};

struct ValidationReport {
    bool g_nonnegative = false;
    double g_min = 0.0;
    double g_min_at = 0.0;
    std::vector<EndpointCheck> degenerate_endpoints;  // Z, left to right
    std::vector<std::string> violations;              // human-readable, empty iff met
    bool hypotheses_met = false;
};

/// Number of points in the validation grid on [a, min(b, a+100)].
inline constexpr int kValidationGridPoints = 1001;

/// Tolerance used throughout for "equals zero" checks on coefficients.
inline constexpr double kZeroTol = 1e-12;

/// Checks the standing hypotheses: g >= 0 on the validation grid, g' != 0 at
/// every finite endpoint where g vanishes, and the compatibility signs of f
/// at finite endpoints. Violations are reported, never thrown.
ValidationReport validate_spec(const DiffusionSpec& s);

/// Equally spaced validation grid on [a, min(b, a+100)].
std::vector<double> validation_grid(const Interval& domain);

/// The image of the spec under x -> a + b - x (finite b required): drift
/// -f(a+b-x), squared diffusion g(a+b-x), same interval. Maps the right
/// endpoint onto the left one so one-sided analyses apply.
DiffusionSpec reflect_spec(const DiffusionSpec& s);

}  // namespace sde1d
