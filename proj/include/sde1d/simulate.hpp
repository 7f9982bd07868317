#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sde1d/rng.hpp"
#include "sde1d/spec.hpp"

namespace sde1d {

/// One simulated (or closed-form) trajectory on a uniform time grid,
/// together with the Brownian path that drove it.
struct Path {
    double dt = 0.0;
    std::vector<double> times;          // 0 = t_0 < ... < t_N
    std::vector<double> states;         // X at each node
    std::vector<double> driving_noise;  // W at each node, W_0 = 0
    // (index, endpoint) of first absorption; states are frozen there after.
    std::optional<std::pair<std::size_t, double>> absorbed_at;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

struct EnsembleStats {
    std::size_t n_paths = 0;
    std::size_t n_absorbed = 0;
    double absorption_probability = 0.0;
    double absorption_probability_se = 0.0;
    double mean_absorption_time = 0.0;  // over absorbed paths; NaN if none
    double mean_absorption_time_se = 0.0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double horizon = 0.0;
};

struct SimOptions {
    /// Multiplier on the absorption tolerance band (sensitivity studies).
    double tol_abs_scale = 1.0;
    /// Worker threads for ensembles; 0 = hardware default. Results are
    /// bit-identical for any thread count.
    unsigned threads = 0;
};

/// Half-width of the absorption band at a degenerate endpoint: one Euler
/// step from distance d has noise scale sqrt(2 g'(e) d dt), which first
/// reaches the endpoint at d = 2 g'(e) dt. States inside the band are
/// declared absorbed.
double absorption_tolerance(double gprime_at_endpoint, double dt, double scale = 1.0);

/// Euler-Maruyama path of an Ito spec (left-endpoint evaluation), with full
/// truncation: sigma = sqrt(2 max(g, 0)) and states clamped to [a, b].
/// Absorption: at degenerate endpoints with f = 0 the path freezes once it
/// enters the absorption band; at finite non-degenerate endpoints the path
/// stops on first crossing (exit). Requires dt > 0, dt < horizon, x0 in [a,b].
Path simulate_ito(const DiffusionSpec& s, double x0, double dt, double horizon,
                  const NoiseStream& stream, const SimOptions& opts = {});

/// Heun predictor-corrector path of a Stratonovich spec (midpoint
/// evaluation):  X* = X + f dt + sigma(X) dW,
///               X' = X + f dt + (sigma(X) + sigma(X*))/2 dW,
/// clamped to the state space; no automatic absorption freezing.
Path simulate_stratonovich(const DiffusionSpec& s, double x0, double dt, double horizon,
                           const NoiseStream& stream, const SimOptions& opts = {});

/// Monte Carlo over n_paths independent paths with per-path streams derived
/// from (master_seed, path_index). Statistics are accumulated by pairwise
/// summation in fixed index order: results are bit-identical for a given
/// (master_seed, n_paths, dt) regardless of scheduling.
EnsembleStats ensemble(const DiffusionSpec& s, double x0, std::size_t n_paths, double dt,
                       double horizon, std::uint64_t master_seed, const SimOptions& opts = {});

/// Left-endpoint partial sum  sum_k v_k (W_{k+1} - W_k).
double ito_integral(std::span<const double> integrand, std::span<const double> w);

/// Midpoint partial sum; integrand values at midpoints are obtained by
/// averaging adjacent node values:  sum_k (v_k + v_{k+1})/2 (W_{k+1} - W_k).
double stratonovich_integral(std::span<const double> integrand, std::span<const double> w);

/// Max-norm residual of the candidate path in the integral form of the SDE,
///   X_t - X_0 - int_0^t f(X) ds - int_0^t sqrt(2 g(X)) dW,
/// drift by trapezoid, stochastic term by the sum matching s.interpretation.
double verify_solution(const DiffusionSpec& s, const Path& candidate);

/// Residual at every node (verify_solution reports its max magnitude).
std::vector<double> verify_solution_profile(const DiffusionSpec& s, const Path& candidate);

/// Pass threshold 5 dt^0.4 for residuals of solutions with Holder-1/2
/// square-root integrands.
double residual_tolerance(double dt);

/// X_t = (sqrt(x0) + W_t / sqrt 2)^2 evaluated on the grid of w.
Path bessel_closed_form(double x0, std::span<const double> w, double dt);

/// The closed form truncated at the n-th grid sign change of
/// sqrt(x0) + W/sqrt2 (the grid surrogate of the n-th zero): states are 0
/// from that node on. Without n sign changes the path equals the closed form.
Path bessel_truncated(double x0, std::span<const double> w, double dt, int n);

/// X_t = W_{t-tau}^2 / 2 for t > tau and 0 before, with W_s = 0 for s < 0;
/// tau must lie on the grid.
Path bessel_shifted(std::span<const double> w, double dt, double tau);

std::string ensemble_json(const EnsembleStats& stats);
std::string path_csv(const Path& path);  // columns: t,W,X,absorbed

}  // namespace sde1d
