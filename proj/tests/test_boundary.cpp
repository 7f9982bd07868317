#include "doctest.h"

#include <cmath>

#include "sde1d/boundary.hpp"

using namespace sde1d;

namespace {

DiffusionSpec make(const char* f, const char* g, double a, double b,
                   Interpretation interp = Interpretation::Ito) {
    return DiffusionSpec{parse_expr(f), parse_expr(g), Interval{a, b}, interp};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("analytic criterion at a left endpoint, g = x") {
    CHECK(classify_boundary(make("0", "x", 0.0, kInf), 0.0) == BoundaryClass::AccessibleAbsorbing);
    CHECK(classify_boundary(make("1/2", "x", 0.0, kInf), 0.0) ==
          BoundaryClass::AccessibleReflecting);
    CHECK(classify_boundary(make("1", "x", 0.0, kInf), 0.0) == BoundaryClass::Inaccessible);
    CHECK(classify_boundary(make("2", "x", 0.0, kInf), 0.0) == BoundaryClass::Inaccessible);
}

TEST_CASE("analytic criterion at both logistic endpoints") {
    DiffusionSpec s = make("x - x^2", "x - x^2", 0.0, 1.0);
    CHECK(classify_boundary(s, 0.0) == BoundaryClass::AccessibleAbsorbing);
    CHECK(classify_boundary(s, 1.0) == BoundaryClass::AccessibleAbsorbing);
    DiffusionSpec driftless = make("0", "x*(1-x)", 0.0, 1.0);
    CHECK(classify_boundary(driftless, 0.0) == BoundaryClass::AccessibleAbsorbing);
    CHECK(classify_boundary(driftless, 1.0) == BoundaryClass::AccessibleAbsorbing);
}

TEST_CASE("classification preconditions") {
    CHECK_THROWS_AS(classify_boundary(make("0", "x", 0.0, 10.0), 10.0), SpecError);  // g(10) > 0
    CHECK_THROWS_AS(classify_boundary(make("0", "x", 0.0, kInf, Interpretation::Stratonovich), 0.0),
                    SpecError);
    CHECK_THROWS_AS(classify_boundary(make("-1", "x", 0.0, kInf), 0.0), SpecError);
    CHECK_THROWS_AS(classify_boundary(make("0", "x", 0.0, kInf), 0.5), SpecError);
}

TEST_CASE("scale covariance: c*(f, g) preserves the class") {
    for (double c : {0.01, 0.5, 3.0, 100.0}) {
        std::string cs = format_number(c);
        CHECK(classify_boundary(make(("0*" + cs).c_str(), (cs + "*x").c_str(), 0.0, kInf), 0.0) ==
              BoundaryClass::AccessibleAbsorbing);
        CHECK(classify_boundary(make((cs + "*0.5").c_str(), (cs + "*x").c_str(), 0.0, kInf), 0.0) ==
              BoundaryClass::AccessibleReflecting);
        CHECK(classify_boundary(make((cs + "*1").c_str(), (cs + "*x").c_str(), 0.0, kInf), 0.0) ==
              BoundaryClass::Inaccessible);
    }
}

// Closed forms for g = x, delta = 1/2 (iterated elementary integrals):
//   f = 0:   I(e) = d - e log(d/e) - e
//   f = 1/2: I(e) = 4 sqrt(d)(sqrt(d) - sqrt(e)) - 2(d - e)
//   f = 1:   I(e) = d log(d/e) - (d - e)
//   f = 2:   I(e) = d^2/(2e) - d + e/2
TEST_CASE("accessibility integral matches the closed forms for g = x") {
    struct Case {
        const char* f;
        double at_1e2, at_1e4, at_1e6;
    };
    const Case cases[] = {
        {"0", 0.450879769945719, 0.499048280680858, 0.499985877636623},
        {"1/2", 0.737157287525381, 0.971915728752538, 0.997173572875254},
        {"1", 1.46601150271407, 3.75869659570812, 6.06118268870216},
        {"2", 12.005, 1249.50005, 124999.5000005},
    };
    for (const Case& c : cases) {
        DiffusionSpec s = make(c.f, "x", 0.0, kInf);
        CAPTURE(c.f);
        CHECK(accessibility_integral(s, 0.0, 0.5, 1e-2) ==
              doctest::Approx(c.at_1e2).epsilon(1e-6));
        CHECK(accessibility_integral(s, 0.0, 0.5, 1e-4) ==
              doctest::Approx(c.at_1e4).epsilon(1e-6));
        CHECK(accessibility_integral(s, 0.0, 0.5, 1e-6) ==
              doctest::Approx(c.at_1e6).epsilon(1e-6));
    }
    CHECK_THROWS_AS(accessibility_integral(make("0", "x", 0.0, kInf), 0.0, 0.5, 0.6), SpecError);
}

TEST_CASE("integral verdicts for g = x") {
    CHECK(classify_via_integral(make("0", "x", 0.0, kInf), 0.0) == IntegralVerdict::Finite);
    CHECK(classify_via_integral(make("1/2", "x", 0.0, kInf), 0.0) == IntegralVerdict::Finite);
    CHECK(classify_via_integral(make("1", "x", 0.0, kInf), 0.0) == IntegralVerdict::Divergent);
    CHECK(classify_via_integral(make("2", "x", 0.0, kInf), 0.0) == IntegralVerdict::Divergent);
}

TEST_CASE("integral verdicts for g = x - x^2 at the left endpoint") {
    CHECK(classify_via_integral(make("0", "x - x^2", 0.0, 1.0), 0.0) == IntegralVerdict::Finite);
    CHECK(classify_via_integral(make("1/2 - x/2", "x - x^2", 0.0, 1.0), 0.0) ==
          IntegralVerdict::Finite);
    CHECK(classify_via_integral(make("1 - x", "x - x^2", 0.0, 1.0), 0.0) ==
          IntegralVerdict::Divergent);
}

TEST_CASE("full report: branching diffusion and drifted variants") {
    BoundaryReport feller = analyze_boundary(make("0", "x", 0.0, kInf), 0.0);
    CHECK(feller.analytic_class == BoundaryClass::AccessibleAbsorbing);
    CHECK(feller.integral_verdict == IntegralVerdict::Finite);
    CHECK(feller.agreement);
    CHECK(feller.f_at == 0.0);
    CHECK(feller.gprime_at == 1.0);
    REQUIRE(feller.integral_estimates.size() == 5);
    // Values increase toward a finite limit as epsilon decreases.
    for (std::size_t k = 0; k + 1 < 5; ++k)
        CHECK(feller.integral_estimates[k].second < feller.integral_estimates[k + 1].second);

    BoundaryReport inacc = analyze_boundary(make("1", "x", 0.0, kInf), 0.0);
    CHECK(inacc.analytic_class == BoundaryClass::Inaccessible);
    CHECK(inacc.integral_verdict == IntegralVerdict::Divergent);
    CHECK(inacc.agreement);
}

TEST_CASE("right endpoint classifies via reflection") {
    DiffusionSpec s = make("x - x^2", "x - x^2", 0.0, 1.0);
    BoundaryReport right = analyze_boundary(s, 1.0);
    CHECK(right.analytic_class == BoundaryClass::AccessibleAbsorbing);
    CHECK(right.integral_verdict == IntegralVerdict::Finite);
    CHECK(right.agreement);
    // Inward orientation: f_at = -f(1) = 0, gprime_at = -g'(1) = 1.
    CHECK(right.f_at == doctest::Approx(0.0));
    CHECK(right.gprime_at == doctest::Approx(1.0));

    // Same numbers as classifying the reflected spec at its left endpoint.
    DiffusionSpec mirrored = reflect_spec(s);
    BoundaryReport left = analyze_boundary(mirrored, 0.0);
    CHECK(left.analytic_class == right.analytic_class);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(left.integral_estimates[k].second ==
              doctest::Approx(right.integral_estimates[k].second).epsilon(1e-10));
}

TEST_CASE("boundary report serializes with the contract field names") {
    std::string j = boundary_report_json(analyze_boundary(make("0", "x", 0.0, kInf), 0.0));
    for (const char* key : {"\"endpoint\"", "\"f_at\"", "\"gprime_at\"", "\"analytic_class\"",
                            "\"integral_estimates\"", "\"integral_verdict\"", "\"agreement\""})
        CHECK(j.find(key) != std::string::npos);
}
