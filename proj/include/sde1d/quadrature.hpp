#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace sde1d {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Computed once per n via Newton iteration on the Legendre polynomial and
/// cached; accurate to machine precision for n <= a few hundred.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
double gauss_legendre_integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Classic recursive adaptive Simpson. `tol` is an absolute tolerance on the
/// whole interval; recursion stops at `max_depth` halvings.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

}  // namespace sde1d
