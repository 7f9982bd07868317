#pragma once

#include <string>
#include <vector>

#include "sde1d/spec.hpp"

namespace sde1d {

enum class BoundaryCondition { Dirichlet0, NeumannReflecting };

std::string to_string(BoundaryCondition bc);

/// Finite-difference solution of g T'' + f T' = -1 on [a, b]:
/// the mean time to absorption started from each grid node.
struct MeanTimeSolution {
    std::vector<double> grid;    // n+2 uniform nodes including both endpoints
    std::vector<double> values;  // T at each node (time units)
    BoundaryCondition left_bc = BoundaryCondition::Dirichlet0;
    BoundaryCondition right_bc = BoundaryCondition::Dirichlet0;
    double residual_norm = 0.0;  // max |discrete residual| over interior rows

    /// Linear interpolation of T at x (grid is uniform).
    double at(double x) const;
};

/// Solves the mean-absorption-time boundary value problem with second-order
/// central differences on n interior nodes and a direct tridiagonal solve.
/// Endpoint rows impose the boundary condition exactly (no PDE row at a
/// degenerate endpoint); NeumannReflecting uses the one-sided second-order
/// stencil for T' = 0. Requires an Ito spec, finite endpoints, n >= 3, and
/// at least one absorbing (Dirichlet0) endpoint.
MeanTimeSolution solve_mean_absorption_time(const DiffusionSpec& s, int n, BoundaryCondition left,
                                            BoundaryCondition right);

/// -(1-x0) log(1-x0) - x0 log(x0), with 0 log 0 := 0. Mean absorption time
/// of dX = sqrt(2 X (1-X)) dW on [0, 1]. Requires 0 <= x0 <= 1.
double logistic_mean_time(double x0);

/// Mean absorption time of dX = X(1-X) dt + sqrt(2 X(1-X)) dW on [0, 1]:
///   (e^{-x0} - 1)/(e - 1) * I + e^{-x0} * J(x0),
/// I = int_0^1 e^y log((1-y)/y) dy, J(x0) the same integrand up to x0,
/// both evaluated by adaptive Simpson (tol 1e-10) split at the integrable
/// log singularities y = 0 and y = 1. Requires 0 <= x0 <= 1.
double drifted_logistic_mean_time(double x0);

/// x0 log(M / x0): mean exit time of dX = sqrt(2 X) dW from (0, M). Grows
/// without bound as M -> infinity. Requires 0 < x0 <= M.
double feller_exit_time(double x0, double M);

std::string mean_time_json(const MeanTimeSolution& sol);
std::string mean_time_csv(const MeanTimeSolution& sol);  // columns: x,T

}  // namespace sde1d
