#include "sde1d/transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json_detail.hpp"

namespace sde1d {

namespace {

// Bisection on a sign change of `fn` over [lo, hi].
double bisect(const std::function<double(double)>& fn, double lo, double hi, double flo) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

double safe_eval(const Expr& e, double x) {
    try {
        return e.eval(x);
    } catch (const EvalError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Canonicalize to the polynomial normal form when the expression is a
// polynomial; otherwise return it unchanged (constant folding already done
// by the builders).
Expr canonical(const Expr& e) {
    if (auto p = e.polynomial()) return Expr::from_polynomial(*p);
    return e;
}

}  // namespace

std::vector<double> degenerate_candidates(const DiffusionSpec& s) {
    std::vector<double> grid = validation_grid(s.domain);
    const Expr& g = s.g;
    Expr gprime = g.derivative();
    std::vector<double> roots;
    auto push = [&roots](double x) {
        for (double r : roots)
            if (std::abs(r - x) <= 1e-9 * std::max(1.0, std::abs(x))) return;
        roots.push_back(x);
    };

    // Finite endpoints first: every paper example degenerates there.
    if (std::abs(safe_eval(g, s.domain.a)) <= kZeroTol) push(s.domain.a);
    if (s.domain.b_finite() && std::abs(safe_eval(g, s.domain.b)) <= kZeroTol) push(s.domain.b);

    std::vector<double> gv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = safe_eval(g, grid[i]);

    auto g_fn = [&g](double x) { return g.eval(x); };
    auto gp_fn = [&gprime](double x) { return gprime.eval(x); };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double ga = gv[i], gb = gv[i + 1];
        if (std::isnan(ga) || std::isnan(gb)) continue;
        if (std::abs(ga) <= kZeroTol) {
            push(grid[i]);
            continue;
        }
        if ((ga < 0.0) != (gb < 0.0)) {
            // Genuine sign change (g may dip slightly negative numerically).
            push(bisect(g_fn, grid[i], grid[i + 1], ga));
            continue;
        }
        // Touching minimum: g >= 0 with a zero of g' inside the cell.
        double pa = safe_eval(gprime, grid[i]), pb = safe_eval(gprime, grid[i + 1]);
        if (!std::isnan(pa) && !std::isnan(pb) && pa < 0.0 && pb > 0.0) {
            double x = bisect(gp_fn, grid[i], grid[i + 1], pa);
            if (std::abs(safe_eval(g, x)) <= kZeroTol) push(x);
        }
    }
    if (std::abs(gv.back()) <= kZeroTol) push(grid.back());

    std::sort(roots.begin(), roots.end());
    return roots;
}

void absorbing_state_audit(const DiffusionSpec& source, const DiffusionSpec& target,
                           TransformReport& report) {
    Expr gprime = source.g.derivative();
    for (double x : degenerate_candidates(source)) {
        double fs = safe_eval(source.f, x);
        double ft = safe_eval(target.f, x);
        bool trivial_src = std::abs(fs) <= kZeroTol;
        bool trivial_tgt = std::abs(ft) <= kZeroTol;
        if (trivial_src) report.fixed_points_source.push_back(x);
        if (trivial_tgt) report.fixed_points_target.push_back(x);
        if (trivial_src == trivial_tgt) continue;
        double gp = safe_eval(gprime, x);
        if (!(std::abs(gp) > kZeroTol)) {
            // g'(x*) = 0: the drift correction vanishes at x*, so the
            // transformation says nothing about this point.
            report.degenerate_points.push_back(x);
            report.warnings.push_back("g' vanishes at common root x = " + format_number(x) +
                                      "; point excluded from the audit");
            continue;
        }
        if (trivial_src)
            report.destroyed.push_back(x);
        else
            report.created.push_back(x);
    }
}

namespace {

TransformReport transform_impl(const DiffusionSpec& s, double sign, Interpretation expected,
                               Interpretation target_interp) {
    if (s.interpretation != expected)
        throw SpecError("transformation requires a " + to_string(expected) +
                        " source specification");
    TransformReport report;
    report.source = s;
    Expr half_gprime = mul(Expr::number(0.5), s.g.derivative());
    Expr correction = sign < 0.0 ? negate(half_gprime) : half_gprime;
    report.correction = canonical(correction);
    report.target.f = canonical(add(s.f, correction));
    report.target.g = s.g;
    report.target.domain = s.domain;
    report.target.interpretation = target_interp;
    absorbing_state_audit(report.source, report.target, report);
    return report;
}

}  // namespace

TransformReport ito_to_stratonovich(const DiffusionSpec& s) {
    return transform_impl(s, -1.0, Interpretation::Ito, Interpretation::Stratonovich);
}

TransformReport stratonovich_to_ito(const DiffusionSpec& s) {
    return transform_impl(s, +1.0, Interpretation::Stratonovich, Interpretation::Ito);
}

std::string transform_report_json(const TransformReport& report) {
    nlohmann::json j{{"source", detail::spec_json(report.source)},
                     {"target", detail::spec_json(report.target)},
                     {"correction", report.correction.str()},
                     {"fixed_points_source", report.fixed_points_source},
                     {"fixed_points_target", report.fixed_points_target},
                     {"destroyed", report.destroyed},
                     {"created", report.created},
                     {"degenerate_points", report.degenerate_points},
                     {"warnings", report.warnings}};
    return j.dump(2);
}

}  // namespace sde1d
