#include "sde1d/spec.hpp"

#include <cmath>

namespace sde1d {

std::string to_string(Interpretation interp) {
    return interp == Interpretation::Ito ? "ito" : "stratonovich";
}

Interpretation interpretation_from_string(const std::string& s) {
    if (s == "ito" || s == "Ito" || s == "ITO") return Interpretation::Ito;
    if (s == "stratonovich" || s == "Stratonovich" || s == "strat")
        return Interpretation::Stratonovich;
    throw SpecError("unknown interpretation '" + s + "' (expected ito or stratonovich)");
}

std::vector<double> validation_grid(const Interval& domain) {
    double lo = domain.a;
    double hi = std::min(domain.b, domain.a + 100.0);
    std::vector<double> grid(kValidationGridPoints);
    const int n = kValidationGridPoints - 1;
    for (int i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
    grid.back() = hi;
    return grid;
}

ValidationReport validate_spec(const DiffusionSpec& s) {
    ValidationReport report;
    const Interval& dom = s.domain;
    if (!(std::isfinite(dom.a)) || !(dom.a < dom.b)) {
        report.violations.push_back("domain must satisfy a < b with a finite");
        return report;
    }

    // Nonnegativity of g on the validation grid.
    report.g_nonnegative = true;
    report.g_min = std::numeric_limits<double>::infinity();
    for (double x : validation_grid(dom)) {
        double gx;
        try {
            gx = s.g.eval(x);
        } catch (const EvalError& e) {
            report.g_nonnegative = false;
            report.violations.push_back("g not evaluable at x=" + format_number(x) + ": " + e.what());
            break;
        }
        if (gx < report.g_min) {
            report.g_min = gx;
            report.g_min_at = x;
        }
    }
    if (report.g_min < -kZeroTol) {
        report.g_nonnegative = false;
        report.violations.push_back("g < 0 on the state space (g(" + format_number(report.g_min_at) +
                                    ") = " + format_number(report.g_min) + ")");
    }

    // Degenerate finite endpoints: g = 0 there requires g' != 0, and f must
    // point into the interval (f(a) >= 0 on the left, f(b) <= 0 on the right).
    Expr gprime = s.g.derivative();
    auto check_endpoint = [&](double e, bool left) {
        double ge, fe;
        try {
            ge = s.g.eval(e);
            fe = s.f.eval(e);
        } catch (const EvalError& err) {
            report.violations.push_back("coefficients not evaluable at endpoint " +
                                        format_number(e) + ": " + err.what());
            return;
        }
        bool compatible = left ? fe >= -kZeroTol : fe <= kZeroTol;
        if (!compatible)
            report.violations.push_back("compatibility violated: f(" + format_number(e) + ") = " +
                                        format_number(fe) + (left ? " < 0" : " > 0"));
        if (std::abs(ge) <= kZeroTol) {
            EndpointCheck chk;
            chk.endpoint = e;
            chk.g_value = ge;
            chk.f_value = fe;
            chk.compatible = compatible;
            try {
                chk.gprime = gprime.eval(e);
            } catch (const EvalError&) {
                chk.gprime = std::numeric_limits<double>::quiet_NaN();
            }
            chk.gprime_nonzero = std::isfinite(chk.gprime) && std::abs(chk.gprime) > kZeroTol;
            if (!chk.gprime_nonzero)
                report.violations.push_back("g'(" + format_number(e) +
                                            ") = 0 at a degenerate endpoint");
            report.degenerate_endpoints.push_back(chk);
        }
    };
    check_endpoint(dom.a, /*left=*/true);
    if (dom.b_finite()) check_endpoint(dom.b, /*left=*/false);

    report.hypotheses_met = report.violations.empty();
    return report;
}

DiffusionSpec reflect_spec(const DiffusionSpec& s) {
    if (!s.domain.b_finite()) throw SpecError("reflect_spec requires a finite right endpoint");
    Expr mirror = sub(Expr::number(s.domain.a + s.domain.b), Expr::variable());
    DiffusionSpec out;
    out.f = negate(s.f.substitute(mirror));
    out.g = s.g.substitute(mirror);
    out.domain = s.domain;
    out.interpretation = s.interpretation;
    return out;
}

}  // namespace sde1d
