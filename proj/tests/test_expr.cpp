#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sde1d/expr.hpp"

using namespace sde1d;

namespace {

// Central finite difference, the independent oracle for the symbolic
// derivative (h = 1e-6 per the toolkit's documented convention).
double central_diff(const Expr& e, double x, double h = 1e-6) {
    return (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
}

void check_derivative_against_fd(const Expr& e, double lo, double hi, int points = 100) {
    Expr d = e.derivative();
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(lo, hi);
    int checked = 0;
    for (int i = 0; i < points * 4 && checked < points; ++i) {
        double x = u(rng);
        double sym, fd;
        try {
            sym = d.eval(x);
            fd = central_diff(e, x);
        } catch (const EvalError&) {
            continue;  // outside the expression's domain
        }
        if (!std::isfinite(sym) || !std::isfinite(fd) || std::abs(sym) > 1e8) continue;
        ++checked;
        CAPTURE(e.str());
        CAPTURE(x);
        CHECK(std::abs(fd - sym) <= 1e-6 * std::max(1.0, std::abs(sym)));
    }
    CHECK(checked >= points / 2);
}

Expr random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_int_distribution<int> small(0, 4);
    switch (pick(rng)) {
        case 0: return Expr::variable();
        case 1: return Expr::number(small(rng));
        case 2: return Expr::number(small(rng) + 0.5);
        case 3: return add(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 4: return sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 5: return mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 6: return divide(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
        case 7: return pow_int(random_expr(rng, depth - 1), small(rng));
        case 8: return negate(random_expr(rng, depth - 1));
        default: {
            Expr arg = random_expr(rng, depth - 1);
            switch (small(rng) % 3) {
                case 0: return sqrt_of(arg);
                case 1: return exp_of(arg);
                default: return log_of(arg);
            }
        }
    }
}

}  // namespace

TEST_CASE("parse: identity expression") {
    Expr e = parse_expr("x");
    CHECK(e.nodes().size() == 1);
    CHECK(e.nodes()[0].op == ExprOp::Var);
}

TEST_CASE("parse: x - x^2 structure and value") {
    Expr e = parse_expr("x - x^2");
    const auto& nodes = e.nodes();
    const ExprNode& root = nodes[static_cast<std::size_t>(e.root())];
    CHECK(root.op == ExprOp::Sub);
    CHECK(nodes[static_cast<std::size_t>(root.lhs)].op == ExprOp::Var);
    CHECK(nodes[static_cast<std::size_t>(root.rhs)].op == ExprOp::Pow);
    CHECK(e.eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));  // 0.5 - 0.25 by hand
}

TEST_CASE("parse: unbalanced parenthesis reports byte offset") {
    try {
        parse_expr("sqrt(2*x");
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 9);
    }
}

TEST_CASE("parse: unknown identifier") {
    try {
        parse_expr("2*y + 1");
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 3);  // 1-based position of 'y'
        CHECK(std::string(err.what()).find("unknown identifier") != std::string::npos);
    }
}

TEST_CASE("parse: exponent restricted to nonnegative integer literals") {
    CHECK_THROWS_AS(parse_expr("x^x"), ParseError);
    CHECK_THROWS_AS(parse_expr("x^1.5"), ParseError);
    CHECK_THROWS_AS(parse_expr("x^-2"), ParseError);
    CHECK(parse_expr("x^0").eval(3.0) == 1.0);
    // '^' is right-associative: x^2^3 = x^(2^3).
    CHECK(parse_expr("x^2^3").eval(2.0) == 256.0);
}

TEST_CASE("parse: whitespace insignificant, empty input rejected") {
    CHECK(identical(parse_expr("x-x^2"), parse_expr("  x -\tx ^ 2 ")));
    CHECK_THROWS_AS(parse_expr("   "), ParseError);
}

TEST_CASE("eval: logistic factor roots and sqrt") {
    CHECK(parse_expr("x - x^2").eval(1.0) == 0.0);
    CHECK(parse_expr("sqrt(2*x)").eval(2.0) == 2.0);
}

TEST_CASE("eval: domain errors instead of NaN") {
    CHECK_THROWS_AS(parse_expr("log(x)").eval(-1.0), EvalError);
    CHECK_THROWS_AS(parse_expr("sqrt(x)").eval(-0.5), EvalError);
    CHECK_THROWS_AS(parse_expr("1/x").eval(0.0), EvalError);
    try {
        parse_expr("1 + log(x - 2)").eval(1.0);
        FAIL("expected EvalError");
    } catch (const EvalError& err) {
        CHECK(err.subexpr() == "log(x - 2)");
    }
}

TEST_CASE("differentiate: d/dx x = 1") {
    Expr d = parse_expr("x").derivative();
    CHECK(d.is_number());
    CHECK(d.number_value() == 1.0);
    CHECK(d.str() == "1");
}

TEST_CASE("differentiate: x - x^2 equals 1 - 2x") {
    Expr d = parse_expr("x - x^2").derivative();
    CHECK(d.eval(0.0) == 1.0);
    CHECK(equivalent(d, parse_expr("1 - 2*x")));
    check_derivative_against_fd(parse_expr("x - x^2"), 0.05, 0.95);
}

TEST_CASE("differentiate: product form x*(1-x) at 0") {
    Expr d = parse_expr("x*(1-x)").derivative();
    CHECK(d.eval(0.0) == 1.0);
    check_derivative_against_fd(parse_expr("x*(1-x)"), 0.05, 0.95);
}

TEST_CASE("differentiate: every coefficient expression used in this suite") {
    for (const char* text : {"x", "sqrt(2*x)", "exp(x)*log(x + 2)", "x^3 - 2*x + 1/2",
                             "(1 - x)/(1 + x^2)", "sqrt(x)*exp(-x)"}) {
        check_derivative_against_fd(parse_expr(text), 0.1, 2.0);
    }
}

TEST_CASE("pretty-print/parse round-trip is structurally identical") {
    std::mt19937 rng(987654321);
    int done = 0;
    for (int i = 0; i < 600 && done < 300; ++i) {
        Expr e = random_expr(rng, 4);
        std::string text = e.str();
        CAPTURE(text);
        Expr back = parse_expr(text);
        CHECK(identical(e, back));
        ++done;
    }
    CHECK(done == 300);
}

TEST_CASE("polynomial extraction and canonical reconstruction") {
    auto p = parse_expr("x*(1-x)").polynomial();
    REQUIRE(p.has_value());
    CHECK(*p == std::vector<double>{0.0, 1.0, -1.0});
    CHECK(Expr::from_polynomial(*p).str() == "x - x^2");

    auto q = parse_expr("-1/2 + 2*x - x^2").polynomial();
    REQUIRE(q.has_value());
    CHECK(*q == std::vector<double>{-0.5, 2.0, -1.0});

    CHECK(!parse_expr("sqrt(x)").polynomial().has_value());
    CHECK(!parse_expr("1/x").polynomial().has_value());
    CHECK(parse_expr("x/2").polynomial().has_value());

    CHECK(equivalent(parse_expr("x*(1-x)"), parse_expr("x - x^2")));
    CHECK(!equivalent(parse_expr("x"), parse_expr("x^2")));
}

TEST_CASE("constant folding") {
    CHECK(parse_expr("1/2 + 0*x").is_number());
    CHECK(parse_expr("1/2 + 0*x").number_value() == 0.5);
    CHECK(parse_expr("-1/2").is_number());
    CHECK(parse_expr("-1/2").number_value() == -0.5);
    CHECK(parse_expr("x + 0").str() == "x");
    CHECK(parse_expr("1*x").str() == "x");
    CHECK(parse_expr("x^1").str() == "x");
    // 1/0 must not fold into inf; it stays symbolic and fails at eval.
    CHECK_THROWS_AS(parse_expr("1/0").eval(0.0), EvalError);
}

TEST_CASE("substitute: reflection x -> 1 - x") {
    Expr e = parse_expr("x - x^2");
    Expr r = e.substitute(parse_expr("1 - x"));
    // x(1-x) is symmetric about 1/2.
    for (double x : {0.0, 0.25, 0.7, 1.0}) CHECK(r.eval(x) == doctest::Approx(e.eval(x)).epsilon(1e-15));
}
