#include "sde1d/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "json_detail.hpp"

namespace sde1d {

double absorption_tolerance(double gprime_at_endpoint, double dt, double scale) {
    return scale * 2.0 * std::abs(gprime_at_endpoint) * dt;
}

namespace {

struct AbsorbingEndpoint {
    double endpoint;
    double tol;
};

struct StopRules {
    std::vector<AbsorbingEndpoint> absorbing;  // degenerate, f = 0: freeze
    std::vector<double> exits;                 // finite non-degenerate: stop on crossing
    double lo, hi;                             // clamp bounds
};

StopRules make_stop_rules(const DiffusionSpec& s, double dt, double tol_scale) {
    StopRules rules;
    rules.lo = s.domain.a;
    rules.hi = s.domain.b;
    Expr gprime = s.g.derivative();
    auto classify = [&](double e) {
        double ge = s.g.eval(e), fe = s.f.eval(e);
        if (std::abs(ge) <= kZeroTol) {
            if (std::abs(fe) <= kZeroTol) {
                double gp = gprime.eval(e);
                rules.absorbing.push_back({e, absorption_tolerance(gp, dt, tol_scale)});
            }
            // degenerate with f(e) > 0: reflecting or inaccessible, no stop
        } else {
            rules.exits.push_back(e);
        }
    };
    classify(s.domain.a);
    if (s.domain.b_finite()) classify(s.domain.b);
    return rules;
}

// Returns the endpoint the state is stopped at, if any.
std::optional<double> stopped_at(const StopRules& rules, double x_raw) {
    for (const AbsorbingEndpoint& ab : rules.absorbing)
        if (std::abs(x_raw - ab.endpoint) < ab.tol) return ab.endpoint;
    for (double e : rules.exits) {
        if (e == rules.lo && x_raw <= e) return e;
        if (e == rules.hi && x_raw >= e) return e;
    }
    return std::nullopt;
}

struct StepOutcome {
    bool absorbed = false;
    std::size_t index = 0;
    double endpoint = 0.0;
};

void check_sim_args(const DiffusionSpec& s, double x0, double dt, double horizon) {
    if (!(dt > 0.0)) throw SpecError("simulation requires dt > 0");
    if (!(dt < horizon)) throw SpecError("simulation requires dt < horizon");
    if (x0 < s.domain.a || x0 > s.domain.b) throw SpecError("x0 outside the state space");
}

std::size_t step_count(double dt, double horizon) {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

// Core Euler-Maruyama chain. on_node(k, X_k, W_k) is called for every node
// (0..N) until absorption; returns the stop information.
template <typename OnNode>
StepOutcome run_ito_chain(const DiffusionSpec& s, double x0, double dt, double horizon,
                          const NoiseStream& stream, const StopRules& rules, OnNode&& on_node) {
    const std::size_t n = step_count(dt, horizon);
    const double root_dt = std::sqrt(dt);
    double x = x0, w = 0.0;
    StepOutcome out;
    if (auto e = stopped_at(rules, x)) {
        out = {true, 0, *e};
        on_node(std::size_t{0}, *e, w);
        return out;
    }
    on_node(std::size_t{0}, x, w);
    for (std::size_t k = 0; k < n; ++k) {
        double dw = root_dt * stream.normal(k);
        w += dw;
        double gx = s.g.eval(x);
        double sigma = std::sqrt(2.0 * std::max(gx, 0.0));
        double x_raw = x + s.f.eval(x) * dt + sigma * dw;
        if (auto e = stopped_at(rules, x_raw)) {
            out = {true, k + 1, *e};
            on_node(k + 1, *e, w);
            return out;
        }
        x = std::clamp(x_raw, rules.lo, rules.hi);
        on_node(k + 1, x, w);
    }
    return out;
}

}  // namespace

Path simulate_ito(const DiffusionSpec& s, double x0, double dt, double horizon,
                  const NoiseStream& stream, const SimOptions& opts) {
    if (s.interpretation != Interpretation::Ito)
        throw SpecError("simulate_ito requires an Ito specification");
    check_sim_args(s, x0, dt, horizon);
    const std::size_t n = step_count(dt, horizon);
    StopRules rules = make_stop_rules(s, dt, opts.tol_abs_scale);

    Path path;
    path.dt = dt;
    path.times.resize(n + 1);
    path.states.resize(n + 1);
    path.driving_noise.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) path.times[k] = static_cast<double>(k) * dt;

    StepOutcome out = run_ito_chain(s, x0, dt, horizon, stream, rules,
                                    [&](std::size_t k, double x, double w) {
                                        path.states[k] = x;
                                        path.driving_noise[k] = w;
                                    });
    if (out.absorbed) {
        path.absorbed_at = {out.index, out.endpoint};
        // The state freezes; the driving noise keeps evolving.
        const double root_dt = std::sqrt(dt);
        for (std::size_t k = out.index; k < n; ++k) {
            path.states[k + 1] = out.endpoint;
            path.driving_noise[k + 1] = path.driving_noise[k] + root_dt * stream.normal(k);
        }
    }
    return path;
}

Path simulate_stratonovich(const DiffusionSpec& s, double x0, double dt, double horizon,
                           const NoiseStream& stream, const SimOptions&) {
    if (s.interpretation != Interpretation::Stratonovich)
        throw SpecError("simulate_stratonovich requires a Stratonovich specification");
    check_sim_args(s, x0, dt, horizon);
    const std::size_t n = step_count(dt, horizon);
    const double root_dt = std::sqrt(dt);
    const double lo = s.domain.a, hi = s.domain.b;

    Path path;
    path.dt = dt;
    path.times.resize(n + 1);
    path.states.resize(n + 1);
    path.driving_noise.resize(n + 1);
    double x = x0, w = 0.0;
    path.times[0] = 0.0;
    path.states[0] = x;
    path.driving_noise[0] = 0.0;
    auto sigma_at = [&s](double y) { return std::sqrt(2.0 * std::max(s.g.eval(y), 0.0)); };
    for (std::size_t k = 0; k < n; ++k) {
        double dw = root_dt * stream.normal(k);
        w += dw;
        double fx = s.f.eval(x) * dt;
        double s0 = sigma_at(x);
        double predictor = std::clamp(x + fx + s0 * dw, lo, hi);
        x = std::clamp(x + fx + 0.5 * (s0 + sigma_at(predictor)) * dw, lo, hi);
        path.times[k + 1] = static_cast<double>(k + 1) * dt;
        path.states[k + 1] = x;
        path.driving_noise[k + 1] = w;
    }
    return path;
}

namespace {

// Pairwise summation in fixed index order.
double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

EnsembleStats ensemble(const DiffusionSpec& s, double x0, std::size_t n_paths, double dt,
                       double horizon, std::uint64_t master_seed, const SimOptions& opts) {
    if (n_paths < 1) throw SpecError("ensemble requires n_paths >= 1");
    check_sim_args(s, x0, dt, horizon);

    std::vector<std::uint8_t> absorbed(n_paths, 0);
    std::vector<double> abs_time(n_paths, 0.0);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        if (s.interpretation == Interpretation::Ito) {
            StopRules rules = make_stop_rules(s, dt, opts.tol_abs_scale);
            for (std::size_t p = begin; p < end; ++p) {
                NoiseStream stream(master_seed, p);
                StepOutcome out =
                    run_ito_chain(s, x0, dt, horizon, stream, rules, [](std::size_t, double, double) {});
                absorbed[p] = out.absorbed ? 1 : 0;
                abs_time[p] = static_cast<double>(out.index) * dt;
            }
        } else {
            for (std::size_t p = begin; p < end; ++p) {
                NoiseStream stream(master_seed, p);
                simulate_stratonovich(s, x0, dt, horizon, stream, opts);
            }
        }
    };

    unsigned threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min({threads, 8u, static_cast<unsigned>(n_paths)}));
    if (threads == 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (n_paths + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t begin = t * chunk, end = std::min(n_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (std::thread& th : pool) th.join();
    }

    EnsembleStats stats;
    stats.n_paths = n_paths;
    stats.seed = master_seed;
    stats.dt = dt;
    stats.horizon = horizon;

    std::vector<double> indicator(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) indicator[p] = absorbed[p] ? 1.0 : 0.0;
    double n_abs = pairwise_sum(indicator);
    stats.n_absorbed = static_cast<std::size_t>(std::llround(n_abs));
    double n = static_cast<double>(n_paths);
    double p_hat = n_abs / n;
    stats.absorption_probability = p_hat;
    stats.absorption_probability_se =
        n_paths > 1 ? std::sqrt(p_hat * (1.0 - p_hat) / (n - 1.0)) : 0.0;

    if (stats.n_absorbed > 0) {
        std::vector<double> times;
        times.reserve(stats.n_absorbed);
        for (std::size_t p = 0; p < n_paths; ++p)
            if (absorbed[p]) times.push_back(abs_time[p]);
        double mean = pairwise_sum(times) / static_cast<double>(times.size());
        stats.mean_absorption_time = mean;
        if (times.size() > 1) {
            std::vector<double> sq(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) {
                double d = times[i] - mean;
                sq[i] = d * d;
            }
            double var = pairwise_sum(sq) / (static_cast<double>(times.size()) - 1.0);
            stats.mean_absorption_time_se = std::sqrt(var / static_cast<double>(times.size()));
        }
    } else {
        stats.mean_absorption_time = std::numeric_limits<double>::quiet_NaN();
        stats.mean_absorption_time_se = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

double ito_integral(std::span<const double> integrand, std::span<const double> w) {
    if (integrand.size() != w.size()) throw SpecError("integrand/noise grids differ in length");
    if (w.size() < 2) throw SpecError("integral needs at least two nodes");
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) sum += integrand[k] * (w[k + 1] - w[k]);
    return sum;
}

double stratonovich_integral(std::span<const double> integrand, std::span<const double> w) {
    if (integrand.size() != w.size()) throw SpecError("integrand/noise grids differ in length");
    if (w.size() < 2) throw SpecError("integral needs at least two nodes");
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        sum += 0.5 * (integrand[k] + integrand[k + 1]) * (w[k + 1] - w[k]);
    return sum;
}

std::vector<double> verify_solution_profile(const DiffusionSpec& s, const Path& candidate) {
    const std::size_t m = candidate.states.size();
    if (m < 2 || candidate.driving_noise.size() != m)
        throw SpecError("candidate path must carry its driving noise");
    const double dt = candidate.dt;
    std::vector<double> fx(m), sigma(m);
    for (std::size_t k = 0; k < m; ++k) {
        double x = candidate.states[k];
        fx[k] = s.f.eval(x);
        sigma[k] = std::sqrt(2.0 * std::max(s.g.eval(x), 0.0));
    }
    const bool ito = s.interpretation == Interpretation::Ito;
    std::vector<double> residual(m, 0.0);
    double drift_cum = 0.0, stoch_cum = 0.0;
    const double x0 = candidate.states[0];
    for (std::size_t k = 0; k + 1 < m; ++k) {
        double dw = candidate.driving_noise[k + 1] - candidate.driving_noise[k];
        drift_cum += 0.5 * (fx[k] + fx[k + 1]) * dt;
        stoch_cum += ito ? sigma[k] * dw : 0.5 * (sigma[k] + sigma[k + 1]) * dw;
        residual[k + 1] = candidate.states[k + 1] - x0 - drift_cum - stoch_cum;
    }
    return residual;
}

double verify_solution(const DiffusionSpec& s, const Path& candidate) {
    double worst = 0.0;
    for (double r : verify_solution_profile(s, candidate)) worst = std::max(worst, std::abs(r));
    return worst;
}

double residual_tolerance(double dt) { return 5.0 * std::pow(dt, 0.4); }

Path bessel_closed_form(double x0, std::span<const double> w, double dt) {
    if (x0 < 0.0) throw SpecError("bessel_closed_form requires x0 >= 0");
    Path path;
    path.dt = dt;
    const std::size_t m = w.size();
    path.times.resize(m);
    path.states.resize(m);
    path.driving_noise.assign(w.begin(), w.end());
    const double root = std::sqrt(x0);
    for (std::size_t k = 0; k < m; ++k) {
        path.times[k] = static_cast<double>(k) * dt;
        double y = root + w[k] / std::numbers::sqrt2;
        path.states[k] = y * y;
    }
    return path;
}

Path bessel_truncated(double x0, std::span<const double> w, double dt, int n) {
    if (n < 1) throw SpecError("bessel_truncated requires n >= 1");
    Path path = bessel_closed_form(x0, w, dt);
    const double root = std::sqrt(x0);
    int changes = 0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        double y0 = root + w[k] / std::numbers::sqrt2;
        double y1 = root + w[k + 1] / std::numbers::sqrt2;
        if (y0 * y1 < 0.0 && ++changes == n) {
            std::size_t stop = k + 1;
            for (std::size_t j = stop; j < path.states.size(); ++j) path.states[j] = 0.0;
            path.absorbed_at = {stop, 0.0};
            break;
        }
    }
    return path;
}

Path bessel_shifted(std::span<const double> w, double dt, double tau) {
    if (tau < 0.0) throw SpecError("bessel_shifted requires tau >= 0");
    auto shift = static_cast<std::size_t>(std::llround(tau / dt));
    if (std::abs(static_cast<double>(shift) * dt - tau) > 1e-9 * std::max(1.0, tau))
        throw SpecError("tau must lie on the time grid");
    Path path;
    path.dt = dt;
    const std::size_t m = w.size();
    path.times.resize(m);
    path.states.assign(m, 0.0);
    path.driving_noise.assign(w.begin(), w.end());
    for (std::size_t k = 0; k < m; ++k) {
        path.times[k] = static_cast<double>(k) * dt;
        if (k > shift) {
            double ws = w[k - shift];  // W_{t - tau}, with W = 0 before time 0
            path.states[k] = 0.5 * ws * ws;
        }
    }
    return path;
}

std::string ensemble_json(const EnsembleStats& stats) {
    nlohmann::json j{{"n_paths", stats.n_paths},
                     {"n_absorbed", stats.n_absorbed},
                     {"absorption_probability", stats.absorption_probability},
                     {"absorption_probability_se", stats.absorption_probability_se},
                     {"mean_absorption_time", stats.mean_absorption_time},
                     {"mean_absorption_time_se", stats.mean_absorption_time_se},
                     {"seed", stats.seed},
                     {"dt", stats.dt},
                     {"horizon", stats.horizon}};
    return j.dump(2);
}

std::string path_csv(const Path& path) {
    std::ostringstream out;
    out << "t,W,X,absorbed\n";
    out.precision(17);
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        bool frozen = path.absorbed_at && k >= path.absorbed_at->first;
        out << path.times[k] << ',' << path.driving_noise[k] << ',' << path.states[k] << ','
            << (frozen ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace sde1d
