#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sde1d/spec.hpp"

namespace sde1d {

enum class BoundaryClass { Inaccessible, AccessibleAbsorbing, AccessibleReflecting };
enum class IntegralVerdict { Finite, Divergent, Indeterminate };

std::string to_string(BoundaryClass c);
std::string to_string(IntegralVerdict v);

/// Classification of one finite degenerate endpoint, by the analytic
/// criterion (compare f against g' at the endpoint) and independently by
/// numerical evaluation of the speed/scale accessibility integral.
///
/// f_at and gprime_at are inward-oriented: at a right endpoint they are the
/// values of the reflected spec (-f(b), -g'(b)), so the same truth table
/// applies at both ends:
///   AccessibleAbsorbing  <=>  f_at = 0 (within 1e-12)
///   Inaccessible         <=>  f_at >= gprime_at
///   AccessibleReflecting <=>  0 < f_at < gprime_at
struct BoundaryReport {
    double endpoint = 0.0;
    double f_at = 0.0;
    double gprime_at = 0.0;
    BoundaryClass analytic_class = BoundaryClass::Inaccessible;
    std::vector<std::pair<double, double>> integral_estimates;  // (epsilon, value)
    IntegralVerdict integral_verdict = IntegralVerdict::Indeterminate;
    bool agreement = false;
};

/// Default inner radius for the accessibility integral: 0.5*min(1, b-a).
double default_delta(const DiffusionSpec& s);

/// Epsilon ladder used by classify_via_integral: 1e-2, 1e-3, ..., 1e-6.
std::vector<double> integral_epsilons();

/// Analytic criterion. Requires: validate_spec passes, Ito interpretation,
/// `endpoint` a finite domain endpoint with g(endpoint) = 0.
BoundaryClass classify_boundary(const DiffusionSpec& s, double endpoint);

/// Numerical value of
///   int_{a+eps}^{a+delta} int_x^{a+delta} 1/g(y) exp(int_x^y f/g ds) dy dx
/// for a left endpoint; right endpoints are handled by the reflection
/// x -> a+b-x. The inner exponent integral runs on a log-stretched grid
/// (2,000 composite-Simpson nodes per decade); the double integral uses
/// iterated 64-node Gauss-Legendre in the stretched variables.
double accessibility_integral(const DiffusionSpec& s, double endpoint, double delta, double eps);

/// Evaluates the integral over the epsilon ladder and votes:
///   Divergent  - successive values keep growing (ratios all >= 1.05),
///   Finite     - the tail is Cauchy (last increment < 1e-3 of the value)
///                or the increments decay geometrically (ratio <= 0.9),
///   Indeterminate otherwise.
IntegralVerdict classify_via_integral(const DiffusionSpec& s, double endpoint);

/// Runs both routes and assembles the full report;
/// agreement = (verdict Finite <=> analytic class != Inaccessible).
BoundaryReport analyze_boundary(const DiffusionSpec& s, double endpoint);

std::string boundary_report_json(const BoundaryReport& report);

}  // namespace sde1d
