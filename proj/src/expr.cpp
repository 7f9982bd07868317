#include "sde1d/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace sde1d {

// Grants in-file helpers access to the arena constructor.
class ExprBuilder {
public:
    static Expr make(std::vector<ExprNode> nodes) { return Expr(std::move(nodes)); }
};

namespace {

bool is_int_literal(double v, double max = 1e9) {
    return std::isfinite(v) && v == std::floor(v) && v >= 0.0 && v <= max;
}

// Appends a copy of the subtree rooted at `root` of `src` to `dst`,
// returning the index of the copied root.
int append_subtree(std::vector<ExprNode>& dst, const std::vector<ExprNode>& src, int root) {
    const ExprNode& n = src[static_cast<std::size_t>(root)];
    ExprNode copy = n;
    if (n.lhs >= 0) copy.lhs = append_subtree(dst, src, n.lhs);
    if (n.rhs >= 0) copy.rhs = append_subtree(dst, src, n.rhs);
    dst.push_back(copy);
    return static_cast<int>(dst.size()) - 1;
}

Expr make_binary(ExprOp op, const Expr& a, const Expr& b, int pos = -1) {
    std::vector<ExprNode> nodes;
    nodes.reserve(a.nodes().size() + b.nodes().size() + 1);
    int l = append_subtree(nodes, a.nodes(), a.root());
    int r = append_subtree(nodes, b.nodes(), b.root());
    nodes.push_back(ExprNode{op, 0.0, l, r, pos});
    return ExprBuilder::make(std::move(nodes));
}

Expr make_unary(ExprOp op, const Expr& a, int pos = -1) {
    std::vector<ExprNode> nodes;
    nodes.reserve(a.nodes().size() + 1);
    int l = append_subtree(nodes, a.nodes(), a.root());
    nodes.push_back(ExprNode{op, 0.0, l, -1, pos});
    return ExprBuilder::make(std::move(nodes));
}

bool is_literal(const Expr& e, double v) { return e.is_number() && e.number_value() == v; }

}  // namespace

Expr Expr::number(double v) {
    std::vector<ExprNode> nodes{ExprNode{ExprOp::Number, v, -1, -1, -1}};
    return Expr{std::move(nodes)};
}

Expr Expr::variable() {
    std::vector<ExprNode> nodes{ExprNode{ExprOp::Var, 0.0, -1, -1, -1}};
    return Expr{std::move(nodes)};
}

Expr add(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) {
        double v = a.number_value() + b.number_value();
        if (std::isfinite(v)) return Expr::number(v);
    }
    if (is_literal(a, 0.0)) return b;
    if (is_literal(b, 0.0)) return a;
    return make_binary(ExprOp::Add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) {
        double v = a.number_value() - b.number_value();
        if (std::isfinite(v)) return Expr::number(v);
    }
    if (is_literal(b, 0.0)) return a;
    if (is_literal(a, 0.0)) return negate(b);
    return make_binary(ExprOp::Sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number()) {
        double v = a.number_value() * b.number_value();
        if (std::isfinite(v)) return Expr::number(v);
    }
    if (is_literal(a, 0.0) || is_literal(b, 0.0)) return Expr::number(0.0);
    if (is_literal(a, 1.0)) return b;
    if (is_literal(b, 1.0)) return a;
    return make_binary(ExprOp::Mul, a, b);
}

Expr divide(const Expr& a, const Expr& b) {
    if (a.is_number() && b.is_number() && b.number_value() != 0.0) {
        double v = a.number_value() / b.number_value();
        if (std::isfinite(v)) return Expr::number(v);
    }
    if (is_literal(b, 1.0)) return a;
    return make_binary(ExprOp::Div, a, b);
}

Expr pow_int(const Expr& base, double exponent) {
    if (!is_int_literal(exponent))
        throw std::invalid_argument("pow_int: exponent must be a nonnegative integer literal");
    if (exponent == 0.0) return Expr::number(1.0);
    if (exponent == 1.0) return base;
    if (base.is_number()) {
        double v = std::pow(base.number_value(), exponent);
        if (std::isfinite(v)) return Expr::number(v);
    }
    return make_binary(ExprOp::Pow, base, Expr::number(exponent));
}

Expr negate(const Expr& a) {
    if (a.is_number()) return Expr::number(-a.number_value());
    return make_unary(ExprOp::Neg, a);
}

Expr sqrt_of(const Expr& a) {
    if (a.is_number() && a.number_value() >= 0.0) return Expr::number(std::sqrt(a.number_value()));
    return make_unary(ExprOp::Sqrt, a);
}

Expr exp_of(const Expr& a) {
    if (a.is_number()) {
        double v = std::exp(a.number_value());
        if (std::isfinite(v)) return Expr::number(v);
    }
    return make_unary(ExprOp::Exp, a);
}

Expr log_of(const Expr& a) {
    if (a.is_number() && a.number_value() > 0.0) return Expr::number(std::log(a.number_value()));
    return make_unary(ExprOp::Log, a);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::string subtree_str(const std::vector<ExprNode>& nodes, int root);

[[noreturn]] void eval_fail(const std::vector<ExprNode>& nodes, int i, const char* what) {
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    std::string sub = subtree_str(nodes, i);
    throw EvalError(std::string(what) + " in '" + sub + "'", std::move(sub), n.pos);
}

}  // namespace

double Expr::eval(double x) const {
    // Fixed scratch for the common case; expressions here are small.
    std::array<double, 96> fixed{};
    std::vector<double> heap;
    double* v = fixed.data();
    if (nodes_.size() > fixed.size()) {
        heap.resize(nodes_.size());
        v = heap.data();
    }
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const ExprNode& nd = nodes_[i];
        switch (nd.op) {
            case ExprOp::Number: v[i] = nd.value; break;
            case ExprOp::Var: v[i] = x; break;
            case ExprOp::Add: v[i] = v[nd.lhs] + v[nd.rhs]; break;
            case ExprOp::Sub: v[i] = v[nd.lhs] - v[nd.rhs]; break;
            case ExprOp::Mul: v[i] = v[nd.lhs] * v[nd.rhs]; break;
            case ExprOp::Div:
                if (v[nd.rhs] == 0.0) eval_fail(nodes_, static_cast<int>(i), "division by zero");
                v[i] = v[nd.lhs] / v[nd.rhs];
                break;
            case ExprOp::Pow: v[i] = std::pow(v[nd.lhs], v[nd.rhs]); break;
            case ExprOp::Neg: v[i] = -v[nd.lhs]; break;
            case ExprOp::Sqrt:
                if (v[nd.lhs] < 0.0) eval_fail(nodes_, static_cast<int>(i), "sqrt of negative argument");
                v[i] = std::sqrt(v[nd.lhs]);
                break;
            case ExprOp::Exp: v[i] = std::exp(v[nd.lhs]); break;
            case ExprOp::Log:
                if (v[nd.lhs] <= 0.0) eval_fail(nodes_, static_cast<int>(i), "log of non-positive argument");
                v[i] = std::log(v[nd.lhs]);
                break;
        }
    }
    double result = v[n - 1];
    if (!std::isfinite(result)) {
        // Locate the first non-finite intermediate for a useful message.
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(v[i])) eval_fail(nodes_, static_cast<int>(i), "non-finite value");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Derivative

namespace {

Expr copy_subtree(const std::vector<ExprNode>& nodes, int root);

Expr derive(const std::vector<ExprNode>& nodes, int i) {
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    switch (n.op) {
        case ExprOp::Number: return Expr::number(0.0);
        case ExprOp::Var: return Expr::number(1.0);
        case ExprOp::Add: return add(derive(nodes, n.lhs), derive(nodes, n.rhs));
        case ExprOp::Sub: return sub(derive(nodes, n.lhs), derive(nodes, n.rhs));
        case ExprOp::Mul: {
            Expr u = copy_subtree(nodes, n.lhs), v = copy_subtree(nodes, n.rhs);
            return add(mul(derive(nodes, n.lhs), v), mul(u, derive(nodes, n.rhs)));
        }
        case ExprOp::Div: {
            Expr u = copy_subtree(nodes, n.lhs), v = copy_subtree(nodes, n.rhs);
            Expr num = sub(mul(derive(nodes, n.lhs), v), mul(u, derive(nodes, n.rhs)));
            return divide(num, pow_int(v, 2.0));
        }
        case ExprOp::Pow: {
            // Exponent is a literal integer by construction.
            double k = nodes[static_cast<std::size_t>(n.rhs)].value;
            Expr u = copy_subtree(nodes, n.lhs);
            return mul(mul(Expr::number(k), pow_int(u, k - 1.0)), derive(nodes, n.lhs));
        }
        case ExprOp::Neg: return negate(derive(nodes, n.lhs));
        case ExprOp::Sqrt: {
            Expr u = copy_subtree(nodes, n.lhs);
            return divide(derive(nodes, n.lhs), mul(Expr::number(2.0), sqrt_of(u)));
        }
        case ExprOp::Exp: {
            Expr u = copy_subtree(nodes, n.lhs);
            return mul(exp_of(u), derive(nodes, n.lhs));
        }
        case ExprOp::Log: {
            Expr u = copy_subtree(nodes, n.lhs);
            return divide(derive(nodes, n.lhs), u);
        }
    }
    throw std::logic_error("derive: unreachable");
}

Expr copy_subtree(const std::vector<ExprNode>& nodes, int root) {
    std::vector<ExprNode> out;
    append_subtree(out, nodes, root);
    return ExprBuilder::make(std::move(out));
}

}  // namespace

Expr Expr::derivative() const { return derive(nodes_, root()); }

Expr Expr::substitute(const Expr& replacement) const {
    struct Rec {
        const std::vector<ExprNode>& nodes;
        const Expr& repl;
        Expr operator()(int i) const {
            const ExprNode& n = nodes[static_cast<std::size_t>(i)];
            switch (n.op) {
                case ExprOp::Number: return Expr::number(n.value);
                case ExprOp::Var: return repl;
                case ExprOp::Add: return add((*this)(n.lhs), (*this)(n.rhs));
                case ExprOp::Sub: return sub((*this)(n.lhs), (*this)(n.rhs));
                case ExprOp::Mul: return mul((*this)(n.lhs), (*this)(n.rhs));
                case ExprOp::Div: return divide((*this)(n.lhs), (*this)(n.rhs));
                case ExprOp::Pow: return pow_int((*this)(n.lhs), nodes[static_cast<std::size_t>(n.rhs)].value);
                case ExprOp::Neg: return negate((*this)(n.lhs));
                case ExprOp::Sqrt: return sqrt_of((*this)(n.lhs));
                case ExprOp::Exp: return exp_of((*this)(n.lhs));
                case ExprOp::Log: return log_of((*this)(n.lhs));
            }
            throw std::logic_error("substitute: unreachable");
        }
    };
    return Rec{nodes_, replacement}(root());
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

namespace {

int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}

void print_node(std::string& out, const std::vector<ExprNode>& nodes, int i, int parent_prec,
                bool right_side) {
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    int prec = precedence(n.op);
    // A negative literal prints like unary minus and needs the same care.
    bool effective_neg = n.op == ExprOp::Neg || (n.op == ExprOp::Number && n.value < 0.0);
    int eff_prec = effective_neg ? std::min(prec, 3) : prec;
    bool parens = eff_prec < parent_prec ||
                  (eff_prec == parent_prec && right_side && parent_prec != 4) ||
                  (effective_neg && right_side && parent_prec >= 1 && parent_prec <= 2);
    if (parens) out += '(';
    switch (n.op) {
        case ExprOp::Number: out += format_number(n.value); break;
        case ExprOp::Var: out += 'x'; break;
        case ExprOp::Add:
            print_node(out, nodes, n.lhs, 1, false);
            out += " + ";
            print_node(out, nodes, n.rhs, 1, true);
            break;
        case ExprOp::Sub:
            print_node(out, nodes, n.lhs, 1, false);
            out += " - ";
            print_node(out, nodes, n.rhs, 1, true);
            break;
        case ExprOp::Mul:
            print_node(out, nodes, n.lhs, 2, false);
            out += "*";
            print_node(out, nodes, n.rhs, 2, true);
            break;
        case ExprOp::Div:
            print_node(out, nodes, n.lhs, 2, false);
            out += "/";
            print_node(out, nodes, n.rhs, 2, true);
            break;
        case ExprOp::Pow:
            // The base of '^' is a `unary` in the grammar: atoms print bare,
            // anything else (including a nested Pow) gets parenthesized.
            print_node(out, nodes, n.lhs, 5, false);
            out += "^";
            print_node(out, nodes, n.rhs, 4, true);
            break;
        case ExprOp::Neg:
            // The grammar reads '-' as part of `unary`, below '^', so the
            // argument must print at atom level ("-x^2" would re-parse as
            // (-x)^2).
            out += '-';
            print_node(out, nodes, n.lhs, 5, true);
            break;
        case ExprOp::Sqrt:
            out += "sqrt(";
            print_node(out, nodes, n.lhs, 0, false);
            out += ')';
            break;
        case ExprOp::Exp:
            out += "exp(";
            print_node(out, nodes, n.lhs, 0, false);
            out += ')';
            break;
        case ExprOp::Log:
            out += "log(";
            print_node(out, nodes, n.lhs, 0, false);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

std::string subtree_str(const std::vector<ExprNode>& nodes, int root) {
    std::string out;
    print_node(out, nodes, root, 0, false);
    return out;
}

}  // namespace

std::string Expr::str() const { return subtree_str(nodes_, root()); }

// ---------------------------------------------------------------------------
// Structural and polynomial comparison

namespace {

bool identical_at(const std::vector<ExprNode>& an, int ai, const std::vector<ExprNode>& bn, int bi) {
    const ExprNode& a = an[static_cast<std::size_t>(ai)];
    const ExprNode& b = bn[static_cast<std::size_t>(bi)];
    if (a.op != b.op) return false;
    if (a.op == ExprOp::Number && a.value != b.value) return false;
    if ((a.lhs >= 0) != (b.lhs >= 0) || (a.rhs >= 0) != (b.rhs >= 0)) return false;
    if (a.lhs >= 0 && !identical_at(an, a.lhs, bn, b.lhs)) return false;
    if (a.rhs >= 0 && !identical_at(an, a.rhs, bn, b.rhs)) return false;
    return true;
}

constexpr std::size_t kMaxPolyDegree = 64;

std::optional<std::vector<double>> poly_at(const std::vector<ExprNode>& nodes, int i) {
    using Coeffs = std::vector<double>;
    const ExprNode& n = nodes[static_cast<std::size_t>(i)];
    auto trim = [](Coeffs c) {
        while (c.size() > 1 && c.back() == 0.0) c.pop_back();
        return c;
    };
    switch (n.op) {
        case ExprOp::Number: return Coeffs{n.value};
        case ExprOp::Var: return Coeffs{0.0, 1.0};
        case ExprOp::Add:
        case ExprOp::Sub: {
            auto a = poly_at(nodes, n.lhs), b = poly_at(nodes, n.rhs);
            if (!a || !b) return std::nullopt;
            Coeffs out(std::max(a->size(), b->size()), 0.0);
            for (std::size_t k = 0; k < a->size(); ++k) out[k] += (*a)[k];
            double s = n.op == ExprOp::Add ? 1.0 : -1.0;
            for (std::size_t k = 0; k < b->size(); ++k) out[k] += s * (*b)[k];
            return trim(std::move(out));
        }
        case ExprOp::Mul: {
            auto a = poly_at(nodes, n.lhs), b = poly_at(nodes, n.rhs);
            if (!a || !b) return std::nullopt;
            if (a->size() + b->size() > kMaxPolyDegree) return std::nullopt;
            Coeffs out(a->size() + b->size() - 1, 0.0);
            for (std::size_t p = 0; p < a->size(); ++p)
                for (std::size_t q = 0; q < b->size(); ++q) out[p + q] += (*a)[p] * (*b)[q];
            return trim(std::move(out));
        }
        case ExprOp::Div: {
            auto a = poly_at(nodes, n.lhs), b = poly_at(nodes, n.rhs);
            if (!a || !b || b->size() != 1 || (*b)[0] == 0.0) return std::nullopt;
            for (double& c : *a) c /= (*b)[0];
            return trim(std::move(*a));
        }
        case ExprOp::Pow: {
            auto a = poly_at(nodes, n.lhs);
            if (!a) return std::nullopt;
            double k = nodes[static_cast<std::size_t>(n.rhs)].value;
            if (!is_int_literal(k, static_cast<double>(kMaxPolyDegree))) return std::nullopt;
            Coeffs out{1.0};
            for (int j = 0; j < static_cast<int>(k); ++j) {
                if (out.size() + a->size() > kMaxPolyDegree) return std::nullopt;
                Coeffs next(out.size() + a->size() - 1, 0.0);
                for (std::size_t p = 0; p < out.size(); ++p)
                    for (std::size_t q = 0; q < a->size(); ++q) next[p + q] += out[p] * (*a)[q];
                out = std::move(next);
            }
            return trim(std::move(out));
        }
        case ExprOp::Neg: {
            auto a = poly_at(nodes, n.lhs);
            if (!a) return std::nullopt;
            for (double& c : *a) c = -c;
            return a;
        }
        default: return std::nullopt;
    }
}

}  // namespace

bool identical(const Expr& a, const Expr& b) {
    return identical_at(a.nodes(), a.root(), b.nodes(), b.root());
}

bool equivalent(const Expr& a, const Expr& b) {
    if (identical(a, b)) return true;
    auto pa = a.polynomial(), pb = b.polynomial();
    return pa && pb && *pa == *pb;
}

std::optional<std::vector<double>> Expr::polynomial() const { return poly_at(nodes_, root()); }

Expr Expr::from_polynomial(std::span<const double> coeffs) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
    if (deg == 0) return Expr::number(0.0);
    bool have = false;
    Expr acc = Expr::number(0.0);
    for (std::size_t k = 0; k < deg; ++k) {
        double c = coeffs[k];
        if (c == 0.0) continue;
        Expr term = k == 0 ? Expr::number(std::abs(c))
                           : mul(Expr::number(std::abs(c)), pow_int(Expr::variable(), static_cast<double>(k)));
        if (!have) {
            acc = c < 0.0 ? negate(term) : term;
            have = true;
        } else {
            acc = c < 0.0 ? sub(acc, term) : add(acc, term);
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    // Offsets are reported 1-based ("sqrt(2*x" fails at offset 9).
    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

    [[noreturn]] static void fail_at(const std::string& what, std::size_t pos) {
        throw ParseError(what + " at offset " + std::to_string(pos + 1), pos + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            skip_ws();
            std::size_t at = pos_;
            if (eat('+')) {
                e = tag(add(e, parse_term()), at);
            } else if (eat('-')) {
                e = tag(sub(e, parse_term()), at);
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            skip_ws();
            std::size_t at = pos_;
            if (eat('*')) {
                e = tag(mul(e, parse_factor()), at);
            } else if (eat('/')) {
                e = tag(divide(e, parse_factor()), at);
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        Expr base = parse_unary();
        skip_ws();
        std::size_t at = pos_;
        if (eat('^')) {
            Expr exp = parse_factor();  // right-associative
            if (!exp.is_number() || !is_int_literal(exp.number_value()))
                fail_at("exponent must be a nonnegative integer literal", at);
            return tag(pow_int(base, exp.number_value()), at);
        }
        return base;
    }

    Expr parse_unary() {
        skip_ws();
        std::size_t at = pos_;
        if (eat('-')) return tag(negate(parse_atom()), at);
        return parse_atom();
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        std::size_t at = pos_;
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc{}) fail("malformed number");
            pos_ += static_cast<std::size_t>(ptr - begin);
            return tag(Expr::number(v), at);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x") return tag(Expr::variable(), at);
            if (name == "sqrt" || name == "exp" || name == "log") {
                if (!eat('(')) fail("expected '(' after function name");
                Expr arg = parse_sum();
                if (!eat(')')) fail("expected ')'");
                if (name == "sqrt") return tag(make_unary(ExprOp::Sqrt, arg), at);
                if (name == "exp") return tag(make_unary(ExprOp::Exp, arg), at);
                return tag(make_unary(ExprOp::Log, arg), at);
            }
            pos_ = start;
            fail_at("unknown identifier '" + std::string(name) + "'", start);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    // Record the source offset on the expression's root node.
    static Expr tag(Expr e, std::size_t at) {
        std::vector<ExprNode> nodes = e.nodes();
        nodes.back().pos = static_cast<int>(at);
        return ExprBuilder::make(std::move(nodes));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) throw ParseError("empty expression at offset 1", 1);
    return Parser(text).run();
}

}  // namespace sde1d
