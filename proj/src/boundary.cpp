#include "sde1d/boundary.hpp"

#include <cmath>
#include <numbers>

#include "json_detail.hpp"
#include "sde1d/quadrature.hpp"

namespace sde1d {

std::string to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::Inaccessible: return "Inaccessible";
        case BoundaryClass::AccessibleAbsorbing: return "AccessibleAbsorbing";
        case BoundaryClass::AccessibleReflecting: return "AccessibleReflecting";
    }
    return "?";
}

std::string to_string(IntegralVerdict v) {
    switch (v) {
        case IntegralVerdict::Finite: return "Finite";
        case IntegralVerdict::Divergent: return "Divergent";
        case IntegralVerdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

double default_delta(const DiffusionSpec& s) {
    double width = s.domain.b_finite() ? s.domain.width() : 1.0;
    return 0.5 * std::min(1.0, width);
}

std::vector<double> integral_epsilons() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

namespace {

// Maps the request onto a left-endpoint problem: returns the spec to use and
// its left endpoint (reflecting the coefficients when `endpoint` is b).
DiffusionSpec leftified(const DiffusionSpec& s, double endpoint) {
    if (endpoint == s.domain.a) return s;
    if (s.domain.b_finite() && endpoint == s.domain.b) return reflect_spec(s);
    throw SpecError("endpoint " + format_number(endpoint) + " is not a domain endpoint");
}

void require_degenerate(const DiffusionSpec& left, const char* who) {
    double g_at = left.g.eval(left.domain.a);
    if (std::abs(g_at) > kZeroTol)
        throw SpecError(std::string(who) + ": Feller test not applicable; boundary non-degenerate");
}

// S(x) = int_x^{a+delta} f/g ds, tabulated on a log-stretched grid
// u = log(x - a) with composite Simpson (kNodesPerDecade per decade) and
// evaluated anywhere by cubic Hermite using the exact nodal derivatives.
class ScaleExponent {
public:
    static constexpr int kNodesPerDecade = 2000;

    ScaleExponent(const DiffusionSpec& s, double delta, double eps_min)
        : a_(s.domain.a), u_lo_(std::log(eps_min)), u_hi_(std::log(delta)) {
        double decades = (u_hi_ - u_lo_) / std::numbers::ln10;
        int n = static_cast<int>(std::ceil(decades * kNodesPerDecade));
        n = std::max(n, 8);
        if (n % 2 != 0) ++n;
        n_ = n;
        h_ = (u_hi_ - u_lo_) / n;
        phi_.resize(static_cast<std::size_t>(n) + 1);
        S_.resize(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) {
            double u = u_lo_ + i * h_;
            double x = a_ + std::exp(u);
            double fx = s.f.eval(x);
            double gx = s.g.eval(x);
            if (gx <= 0.0 || !std::isfinite(fx))
                throw SpecError("quadrature failure: f/g not evaluable at x = " +
                                format_number(x));
            phi_[static_cast<std::size_t>(i)] = fx / gx * std::exp(u);
        }
        S_[static_cast<std::size_t>(n)] = 0.0;
        for (int i = n - 2; i >= 0; i -= 2) {
            auto si = static_cast<std::size_t>(i);
            S_[si + 1] = S_[si + 2] + h_ / 12.0 * (-phi_[si] + 8.0 * phi_[si + 1] + 5.0 * phi_[si + 2]);
            S_[si] = S_[si + 2] + h_ / 3.0 * (phi_[si] + 4.0 * phi_[si + 1] + phi_[si + 2]);
        }
    }

    double operator()(double x) const {
        double u = std::log(x - a_);
        if (u >= u_hi_) return 0.0;
        if (u < u_lo_) u = u_lo_;  // callers stay within [eps_min, delta]
        double t = (u - u_lo_) / h_;
        int i = std::min(static_cast<int>(t), n_ - 1);
        t -= i;
        auto si = static_cast<std::size_t>(i);
        // dS/du = -phi at the nodes.
        double m0 = -phi_[si], m1 = -phi_[si + 1];
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * S_[si] + (t3 - 2 * t2 + t) * h_ * m0 +
               (-2 * t3 + 3 * t2) * S_[si + 1] + (t3 - t2) * h_ * m1;
    }

private:
    double a_, u_lo_, u_hi_, h_;
    int n_ = 0;
    std::vector<double> phi_, S_;
};

double integral_with_table(const DiffusionSpec& left, const ScaleExponent& S, double delta,
                           double eps) {
    const double a = left.domain.a;
    const auto& [nodes, weights] = gauss_legendre(64);
    const double v_hi = std::log(delta);

    auto inner = [&](double x) {
        // int_x^{a+delta} e^{-S(y)} / g(y) dy on v = log(y - a).
        double v_lo = std::log(x - a);
        double mid = 0.5 * (v_lo + v_hi), half = 0.5 * (v_hi - v_lo);
        double sum = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            double v = mid + half * nodes[j];
            double y = a + std::exp(v);
            double gy = left.g.eval(y);
            if (gy <= 0.0) throw SpecError("quadrature failure: g <= 0 inside the interval");
            sum += weights[j] * std::exp(-S(y)) / gy * std::exp(v);
        }
        return half * sum;
    };

    const double u_lo = std::log(eps);
    double mid = 0.5 * (u_lo + v_hi), half = 0.5 * (v_hi - u_lo);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double u = mid + half * nodes[i];
        double x = a + std::exp(u);
        total += weights[i] * std::exp(S(x)) * inner(x) * std::exp(u);
    }
    total *= half;
    if (!std::isfinite(total)) throw SpecError("quadrature failure: non-finite integral value");
    return total;
}

IntegralVerdict vote(const std::vector<std::pair<double, double>>& estimates) {
    if (estimates.size() < 3) return IntegralVerdict::Indeterminate;
    std::vector<double> v;
    v.reserve(estimates.size());
    for (const auto& [eps, value] : estimates) v.push_back(value);

    bool growing = true;
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (!(v[k] != 0.0 && v[k + 1] / v[k] >= 1.05)) growing = false;
    if (growing) return IntegralVerdict::Divergent;

    std::vector<double> d;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) d.push_back(std::abs(v[k + 1] - v[k]));
    double scale = std::abs(v.back());
    if (d.back() < 1e-3 * scale) return IntegralVerdict::Finite;
    // Geometric decay of the increments also certifies a Cauchy tail; the
    // raw 1e-3 cut alone misses sqrt(eps)-rate convergence at eps = 1e-6.
    std::size_t m = d.size();
    if (m >= 3 && d[m - 1] <= 0.9 * d[m - 2] && d[m - 2] <= 0.9 * d[m - 3])
        return IntegralVerdict::Finite;
    return IntegralVerdict::Indeterminate;
}

}  // namespace

BoundaryClass classify_boundary(const DiffusionSpec& s, double endpoint) {
    if (s.interpretation != Interpretation::Ito)
        throw SpecError("boundary classification applies to the Ito interpretation");
    ValidationReport vr = validate_spec(s);
    if (!vr.hypotheses_met)
        throw SpecError("classify_boundary: hypotheses not met: " + vr.violations.front());
    DiffusionSpec left = leftified(s, endpoint);
    require_degenerate(left, "classify_boundary");
    double f_at = left.f.eval(left.domain.a);
    double gp_at = left.g.derivative().eval(left.domain.a);
    if (f_at < -kZeroTol)
        throw SpecError("classify_boundary: f < 0 at the endpoint (outside the criterion)");
    if (std::abs(f_at) <= kZeroTol) return BoundaryClass::AccessibleAbsorbing;
    if (f_at >= gp_at) return BoundaryClass::Inaccessible;
    return BoundaryClass::AccessibleReflecting;
}

double accessibility_integral(const DiffusionSpec& s, double endpoint, double delta, double eps) {
    if (!(eps > 0.0) || !(eps < delta))
        throw SpecError("accessibility_integral requires 0 < eps < delta");
    DiffusionSpec left = leftified(s, endpoint);
    require_degenerate(left, "accessibility_integral");
    ScaleExponent S(left, delta, eps);
    return integral_with_table(left, S, delta, eps);
}

namespace {

std::vector<std::pair<double, double>> estimate_ladder(const DiffusionSpec& s, double endpoint) {
    DiffusionSpec left = leftified(s, endpoint);
    require_degenerate(left, "classify_via_integral");
    double delta = default_delta(s);
    std::vector<double> epsilons;
    for (double eps : integral_epsilons())
        if (eps < delta) epsilons.push_back(eps);
    if (epsilons.empty()) throw SpecError("domain too small for the epsilon ladder");
    ScaleExponent S(left, delta, epsilons.back());
    std::vector<std::pair<double, double>> estimates;
    estimates.reserve(epsilons.size());
    for (double eps : epsilons) estimates.emplace_back(eps, integral_with_table(left, S, delta, eps));
    return estimates;
}

}  // namespace

IntegralVerdict classify_via_integral(const DiffusionSpec& s, double endpoint) {
    return vote(estimate_ladder(s, endpoint));
}

BoundaryReport analyze_boundary(const DiffusionSpec& s, double endpoint) {
    BoundaryReport report;
    report.endpoint = endpoint;
    report.analytic_class = classify_boundary(s, endpoint);
    DiffusionSpec left = leftified(s, endpoint);
    report.f_at = left.f.eval(left.domain.a);
    report.gprime_at = left.g.derivative().eval(left.domain.a);
    report.integral_estimates = estimate_ladder(s, endpoint);
    report.integral_verdict = vote(report.integral_estimates);
    report.agreement = (report.integral_verdict == IntegralVerdict::Finite) ==
                       (report.analytic_class != BoundaryClass::Inaccessible);
    return report;
}

std::string boundary_report_json(const BoundaryReport& report) {
    nlohmann::json estimates = nlohmann::json::array();
    for (const auto& [eps, value] : report.integral_estimates)
        estimates.push_back({{"epsilon", eps}, {"value", value}});
    nlohmann::json j{{"endpoint", report.endpoint},
                     {"f_at", report.f_at},
                     {"gprime_at", report.gprime_at},
                     {"analytic_class", to_string(report.analytic_class)},
                     {"integral_estimates", estimates},
                     {"integral_verdict", to_string(report.integral_verdict)},
                     {"agreement", report.agreement}};
    return j.dump(2);
}

}  // namespace sde1d
