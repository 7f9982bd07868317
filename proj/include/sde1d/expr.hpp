#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sde1d {

/// Syntax error raised by parse_expr. `offset` is the 1-based byte position
/// in the input where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Domain error raised by Expr::eval (sqrt/log of a negative argument,
/// division by zero, non-finite result). Carries the offending
/// sub-expression and, when it came from source text, its byte offset.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::string subexpr, long offset)
        : std::runtime_error(what), subexpr_(std::move(subexpr)), offset_(offset) {}
    const std::string& subexpr() const { return subexpr_; }
    long offset() const { return offset_; }  // -1 for synthesized nodes

private:
    std::string subexpr_;
    long offset_;
};

enum class ExprOp : unsigned char {
    Number,
    Var,  // the single variable `x`
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // exponent restricted to a nonnegative integer literal
    Neg,
    Sqrt,
    Exp,
    Log,
};

struct ExprNode {
    ExprOp op;
    double value = 0.0;  // Number payload
    int lhs = -1;
    int rhs = -1;
    int pos = -1;  // byte offset in source text, -1 if synthesized
};

/// Immutable arithmetic expression in one variable. Nodes live in a flat
/// arena in topological order (children before parents, root last), so
/// evaluation is a single forward pass.
class Expr {
public:
    Expr() : nodes_{ExprNode{ExprOp::Number, 0.0, -1, -1, -1}} {}

    static Expr number(double v);
    static Expr variable();

    double eval(double x) const;
    Expr derivative() const;
    /// Replace the variable by `replacement` (itself an expression in x).
    Expr substitute(const Expr& replacement) const;
    std::string str() const;

    /// Dense coefficients (constant term first) if the expression is a
    /// polynomial in x; nullopt otherwise. Division is accepted only by a
    /// constant, Pow only with literal integer exponents (guaranteed by the
    /// parser), sqrt/exp/log never.
    std::optional<std::vector<double>> polynomial() const;
    static Expr from_polynomial(std::span<const double> coeffs);

    bool is_number() const { return node(root()).op == ExprOp::Number; }
    double number_value() const { return node(root()).value; }

    const std::vector<ExprNode>& nodes() const { return nodes_; }
    int root() const { return static_cast<int>(nodes_.size()) - 1; }

private:
    friend Expr parse_expr(std::string_view);
    friend class ExprBuilder;
    const ExprNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

    explicit Expr(std::vector<ExprNode> nodes) : nodes_(std::move(nodes)) {}
    std::vector<ExprNode> nodes_;
};

/// Structural equality (operator tree and literal values match exactly).
bool identical(const Expr& a, const Expr& b);

/// Equality after constant folding: structurally identical, or both
/// polynomial with identical coefficient vectors.
bool equivalent(const Expr& a, const Expr& b);

// Folding constructors. Each applies constant folding only: literal
// arithmetic, u+0, u-0, 0-u, 1*u, u*1, 0*u, u/1, u^0, u^1, -literal.
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr divide(const Expr& a, const Expr& b);
Expr pow_int(const Expr& base, double exponent);
Expr negate(const Expr& a);
Expr sqrt_of(const Expr& a);
Expr exp_of(const Expr& a);
Expr log_of(const Expr& a);

/// Recursive-descent parser for
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-'? atom
///   atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
/// with func in {sqrt, exp, log}, `^` right-associative and restricted to
/// nonnegative integer literal exponents, whitespace insignificant.
Expr parse_expr(std::string_view text);

/// Shortest round-trip decimal form of a double ("2", "0.5", "1e-05").
std::string format_number(double v);

}  // namespace sde1d
