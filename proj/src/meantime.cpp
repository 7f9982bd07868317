#include "sde1d/meantime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json_detail.hpp"
#include "sde1d/quadrature.hpp"

namespace sde1d {

std::string to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet0 ? "Dirichlet0" : "NeumannReflecting";
}

double MeanTimeSolution::at(double x) const {
    if (grid.size() < 2) throw SpecError("empty mean-time solution");
    double a = grid.front(), b = grid.back();
    if (x < a || x > b) throw SpecError("query outside the solution interval");
    double h = grid[1] - grid[0];
    auto i = static_cast<std::size_t>(std::min((x - a) / h, static_cast<double>(grid.size() - 2)));
    double t = (x - grid[i]) / h;
    return (1.0 - t) * values[i] + t * values[i + 1];
}

namespace {

struct Tridiag {
    std::vector<double> lower, diag, upper;

    std::vector<double> solve(const std::vector<double>& rhs) const {
        const std::size_t m = diag.size();
        std::vector<double> cp(m, 0.0), dp(m, 0.0), x(m, 0.0);
        double den = diag[0];
        if (den == 0.0) throw SpecError("singular system in the mean-time solve");
        cp[0] = upper[0] / den;
        dp[0] = rhs[0] / den;
        for (std::size_t i = 1; i < m; ++i) {
            den = diag[i] - lower[i] * cp[i - 1];
            if (den == 0.0) throw SpecError("singular system in the mean-time solve");
            cp[i] = upper[i] / den;
            dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / den;
        }
        x[m - 1] = dp[m - 1];
        for (std::size_t i = m - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
        return x;
    }
};

// x log x with the 0 log 0 := 0 convention.
double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

MeanTimeSolution solve_mean_absorption_time(const DiffusionSpec& s, int n, BoundaryCondition left,
                                            BoundaryCondition right) {
    if (s.interpretation != Interpretation::Ito)
        throw SpecError("mean absorption time applies to the Ito interpretation");
    if (!s.domain.b_finite()) throw SpecError("mean absorption time requires a bounded state space");
    if (n < 3) throw SpecError("mean absorption time requires n >= 3 interior nodes");
    if (left == BoundaryCondition::NeumannReflecting && right == BoundaryCondition::NeumannReflecting)
        throw SpecError("both endpoints reflecting: no absorption, the system is singular");

    const double a = s.domain.a, b = s.domain.b;
    const int m = n + 2;  // total nodes
    const auto sm = static_cast<std::size_t>(m);
    const double h = (b - a) / (n + 1);

    MeanTimeSolution sol;
    sol.left_bc = left;
    sol.right_bc = right;
    sol.grid.resize(sm);
    for (int i = 0; i < m; ++i) sol.grid[static_cast<std::size_t>(i)] = a + i * h;
    sol.grid.back() = b;

    Tridiag A{std::vector<double>(sm, 0.0), std::vector<double>(sm, 0.0),
              std::vector<double>(sm, 0.0)};
    std::vector<double> rhs(sm, 0.0);
    std::vector<double> fv(sm, 0.0), gv(sm, 0.0);
    for (int i = 1; i <= n; ++i) {
        double x = sol.grid[static_cast<std::size_t>(i)];
        fv[static_cast<std::size_t>(i)] = s.f.eval(x);
        gv[static_cast<std::size_t>(i)] = s.g.eval(x);
    }

    for (int i = 1; i <= n; ++i) {
        auto si = static_cast<std::size_t>(i);
        double gi = gv[si], fi = fv[si];
        A.lower[si] = gi / (h * h) - fi / (2.0 * h);
        A.diag[si] = -2.0 * gi / (h * h);
        A.upper[si] = gi / (h * h) + fi / (2.0 * h);
        rhs[si] = -1.0;
    }

    // Boundary rows. Dirichlet pins the value; the one-sided second-order
    // Neumann stencil has three coefficients, so its third entry is folded
    // into the adjacent PDE row before the tridiagonal sweep.
    if (left == BoundaryCondition::Dirichlet0) {
        A.diag[0] = 1.0;
    } else {
        // (-3 T0 + 4 T1 - T2) / (2h) = 0, eliminate the T2 term via row 1.
        double factor = -1.0 / A.upper[1];
        A.diag[0] = -3.0 - factor * A.lower[1];
        A.upper[0] = 4.0 - factor * A.diag[1];
        rhs[0] = -factor * rhs[1];
    }
    if (right == BoundaryCondition::Dirichlet0) {
        A.diag[sm - 1] = 1.0;
    } else {
        // (3 T_{m-1} - 4 T_{m-2} + T_{m-3}) / (2h) = 0, eliminate T_{m-3}.
        double factor = 1.0 / A.lower[sm - 2];
        A.lower[sm - 1] = -4.0 - factor * A.diag[sm - 2];
        A.diag[sm - 1] = 3.0 - factor * A.upper[sm - 2];
        rhs[sm - 1] = -factor * rhs[sm - 2];
    }

    sol.values = A.solve(rhs);

    // Defect correction for square-root degenerate absorbing endpoints. With
    // y the distance to the endpoint, the solution there behaves like
    //   B y log y + C y^2 log y + smooth,  B = -1/g'(e),  C = f'(e)/(2 g'(e)^2)
    // (matching g T'' + f T' = -1 order by order; only inward orientation
    // changes at the right end). The central stencil mis-differences the
    // singular terms by O(1) at boundary-adjacent nodes, which pollutes the
    // whole solution at O(h). Their discrete defect is computable exactly,
    // so one more sweep with the same matrix removes it and restores second
    // order. The smooth remainder differences cleanly; quadratics are exact.
    Expr gprime = s.g.derivative();
    Expr fprime = s.f.derivative();
    std::vector<double> defect(sm, 0.0);
    bool corrected = false;
    auto accumulate_defect = [&](bool at_left) {
        double e = at_left ? a : b;
        double ge, fe, gpe, fpe;
        try {
            ge = s.g.eval(e);
            fe = s.f.eval(e);
            gpe = gprime.eval(e);
            fpe = fprime.eval(e);
        } catch (const EvalError&) {
            return;
        }
        if (std::abs(ge) > kZeroTol || std::abs(fe) > kZeroTol) return;  // not absorbing-degenerate
        if (std::abs(gpe) <= kZeroTol) return;
        double sign = at_left ? 1.0 : -1.0;  // d(y)/dx
        double g1 = std::abs(gpe);           // inward slope of g
        double f1 = sign * fpe;              // inward slope of f
        double B = -1.0 / g1;
        double C = f1 / (2.0 * g1 * g1);
        auto y_of = [&](double x) { return at_left ? x - a : b - x; };
        auto sing = [&](double x) {
            double y = y_of(x);
            return B * xlogx(y) + C * y * xlogx(y);
        };
        for (int i = 1; i <= n; ++i) {
            auto si = static_cast<std::size_t>(i);
            double x = sol.grid[si];
            double y = y_of(x);
            double ly = std::log(y);
            double d2_exact = B / y + C * (2.0 * ly + 3.0);
            double d1_exact = sign * (B * (ly + 1.0) + C * (2.0 * y * ly + y));
            double d2 = (sing(x + h) - 2.0 * sing(x) + sing(x - h)) / (h * h) - d2_exact;
            double d1 = (sing(x + h) - sing(x - h)) / (2.0 * h) - d1_exact;
            defect[si] += gv[si] * d2 + fv[si] * d1;
        }
        corrected = true;
    };
    if (left == BoundaryCondition::Dirichlet0) accumulate_defect(true);
    if (right == BoundaryCondition::Dirichlet0) accumulate_defect(false);
    if (corrected) {
        std::vector<double> err = A.solve(defect);
        for (std::size_t i = 0; i < sm; ++i) sol.values[i] += err[i];
        for (std::size_t i = 1; i + 1 < sm; ++i) rhs[i] += defect[i];
    }

    // Algebraic residual of the tridiagonal system that was solved.
    double res = 0.0;
    for (int i = 1; i <= n; ++i) {
        auto si = static_cast<std::size_t>(i);
        double row = A.lower[si] * sol.values[si - 1] + A.diag[si] * sol.values[si] +
                     A.upper[si] * sol.values[si + 1];
        res = std::max(res, std::abs(row - rhs[si]));
    }
    sol.residual_norm = res;
    return sol;
}

double logistic_mean_time(double x0) {
    if (!(x0 >= 0.0) || !(x0 <= 1.0)) throw SpecError("logistic_mean_time requires 0 <= x0 <= 1");
    double left = x0 >= 1.0 ? 0.0 : -(1.0 - x0) * std::log1p(-x0);
    double right = x0 <= 0.0 ? 0.0 : -x0 * std::log(x0);
    return left + right;
}

namespace {

// int_{lo}^{hi} e^y log((1-y)/y) dy with integrable log singularities at the
// ends of [0, 1]; the eta-clipped mass is O(eta log eta), far below tol.
double drifted_integral(double lo, double hi) {
    constexpr double kEta = 1e-14;
    constexpr double kTol = 1e-10;
    lo = std::max(lo, kEta);
    hi = std::min(hi, 1.0 - kEta);
    if (hi <= lo) return 0.0;
    auto integrand = [](double y) { return std::exp(y) * std::log((1.0 - y) / y); };
    if (lo < 0.5 && hi > 0.5)
        return adaptive_simpson(integrand, lo, 0.5, kTol / 2) +
               adaptive_simpson(integrand, 0.5, hi, kTol / 2);
    return adaptive_simpson(integrand, lo, hi, kTol);
}

}  // namespace

double drifted_logistic_mean_time(double x0) {
    if (!(x0 >= 0.0) || !(x0 <= 1.0))
        throw SpecError("drifted_logistic_mean_time requires 0 <= x0 <= 1");
    static const double kFull = drifted_integral(0.0, 1.0);
    double partial = drifted_integral(0.0, x0);
    return (std::exp(-x0) - 1.0) / (std::numbers::e - 1.0) * kFull + std::exp(-x0) * partial;
}

double feller_exit_time(double x0, double M) {
    if (!(x0 > 0.0) || !(x0 <= M)) throw SpecError("feller_exit_time requires 0 < x0 <= M");
    return x0 * std::log(M / x0);
}

std::string mean_time_json(const MeanTimeSolution& sol) {
    nlohmann::json j{{"grid", sol.grid},
                     {"values", sol.values},
                     {"boundary_conditions",
                      {{"left", to_string(sol.left_bc)}, {"right", to_string(sol.right_bc)}}},
                     {"residual_norm", sol.residual_norm}};
    return j.dump(2);
}

std::string mean_time_csv(const MeanTimeSolution& sol) {
    std::ostringstream out;
    out << "x,T\n";
    out.precision(17);
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        out << sol.grid[i] << ',' << sol.values[i] << '\n';
    return out.str();
}

}  // namespace sde1d
