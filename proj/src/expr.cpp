#include "fracvar/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "fracvar/errors.hpp"

namespace fracvar::expr {

std::string_view to_string(Var v) noexcept {
    switch (v) {
        case Var::t: return "t";
        case Var::u: return "u";
        case Var::alpha: return "alpha";
    }
    return "?";
}

VarSet::VarSet(std::initializer_list<Var> vars) {
    for (Var v : vars) insert(v);
}

NodePtr make_constant(double v, std::size_t offset) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = v;
    n->offset = offset;
    return n;
}

NodePtr make_variable(Var v, std::size_t offset) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::variable;
    n->var = v;
    n->offset = offset;
    return n;
}

NodePtr make_unary(UnaryOp op, NodePtr arg, std::size_t offset) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::unary;
    n->unary = op;
    n->lhs = std::move(arg);
    n->offset = offset;
    return n;
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs, std::size_t offset) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->binary = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->offset = offset;
    return n;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct FunctionName {
    std::string_view name;
    UnaryOp op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::sin}, {"cos", UnaryOp::cos},   {"exp", UnaryOp::exp},
    {"ln", UnaryOp::ln},   {"sqrt", UnaryOp::sqrt}, {"abs", UnaryOp::abs},
};

class Parser {
public:
    Parser(std::string_view src, const VarSet& allowed) : src_(src), allowed_(allowed) {}

    NodePtr run() {
        skip_space();
        if (pos_ >= src_.size()) syntax("empty expression");
        NodePtr root = parse_expr();
        skip_space();
        if (pos_ < src_.size()) syntax("unexpected '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void syntax(const std::string& msg) const {
        fail(ErrorKind::SyntaxError, msg + " at byte " + std::to_string(pos_), pos_);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('+')) {
                lhs = make_binary(BinaryOp::add, lhs, parse_term(), at);
            } else if (accept('-')) {
                lhs = make_binary(BinaryOp::sub, lhs, parse_term(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('*')) {
                lhs = make_binary(BinaryOp::mul, lhs, parse_unary(), at);
            } else if (accept('/')) {
                lhs = make_binary(BinaryOp::div, lhs, parse_unary(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        skip_space();
        const std::size_t at = pos_;
        if (accept('-')) return make_unary(UnaryOp::neg, parse_unary(), at);
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_space();
        const std::size_t at = pos_;
        if (accept('^')) return make_binary(BinaryOp::pow, base, parse_unary(), at);
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= src_.size()) syntax("unexpected end of input");
        const std::size_t at = pos_;
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            if (NodePtr neg = try_negative_literal()) return neg;
            NodePtr inner = parse_expr();
            if (!accept(')')) syntax("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                ++end;
            }
            const std::string_view word = src_.substr(pos_, end - pos_);
            pos_ = end;
            for (const auto& fn : kFunctions) {
                if (fn.name == word) {
                    if (!accept('(')) syntax("expected '(' after " + std::string(word));
                    NodePtr arg = parse_expr();
                    if (!accept(')')) syntax("expected ')'");
                    return make_unary(fn.op, arg, at);
                }
            }
            if (word == "pi") return make_constant(std::numbers::pi, at);
            std::optional<Var> var;
            if (word == "t") var = Var::t;
            if (word == "u") var = Var::u;
            if (word == "alpha") var = Var::alpha;
            if (!var) {
                fail(ErrorKind::UnknownIdentifier,
                     "unknown identifier '" + std::string(word) + "' at byte " + std::to_string(at), at);
            }
            if (!allowed_.contains(*var)) {
                fail(ErrorKind::DisallowedVariable,
                     "variable '" + std::string(word) + "' is not allowed here (byte " +
                         std::to_string(at) + ")",
                     at);
            }
            return make_variable(*var, at);
        }
        syntax("unexpected '" + std::string(1, c) + "'");
    }

    // "(-2.5)" is how print() writes a negative constant; read it back as one.
    NodePtr try_negative_literal() {
        const std::size_t save = pos_;
        skip_space();
        const std::size_t at = pos_;
        if (accept('-')) {
            skip_space();
            if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
                NodePtr num = parse_number();
                if (accept(')')) return make_constant(-num->value, at);
            }
        }
        pos_ = save;
        return nullptr;
    }

    NodePtr parse_number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t probe = end + 1;
            if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
            if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe]))) {
                end = probe;
                digits();
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, value);
        if (ec != std::errc() || ptr != src_.data() + end) {
            syntax("malformed number");
        }
        pos_ = end;
        return make_constant(value, at);
    }

    std::string_view src_;
    const VarSet& allowed_;
    std::size_t pos_ = 0;
};

}  // namespace

NodePtr parse(std::string_view source, const VarSet& allowed) {
    return Parser(source, allowed).run();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_fault(const Node& node, const std::string& msg) {
    fail(ErrorKind::DomainFault, msg + " (byte " + std::to_string(node.offset) + ")", node.offset);
}

double checked(const Node& node, double v) {
    if (!std::isfinite(v)) domain_fault(node, "non-finite result");
    return v;
}

}  // namespace

double eval(const Node& node, const Bindings& bindings) {
    switch (node.kind) {
        case Node::Kind::constant:
            return node.value;
        case Node::Kind::variable: {
            const auto& v = bindings.get(node.var);
            if (!v) {
                fail(ErrorKind::UnboundVariable,
                     "variable '" + std::string(to_string(node.var)) + "' is unbound", node.offset);
            }
            return *v;
        }
        case Node::Kind::unary: {
            const double x = eval(*node.lhs, bindings);
            switch (node.unary) {
                case UnaryOp::neg: return -x;
                case UnaryOp::sin: return std::sin(x);
                case UnaryOp::cos: return std::cos(x);
                case UnaryOp::exp: return checked(node, std::exp(x));
                case UnaryOp::ln:
                    if (!(x > 0.0)) domain_fault(node, "ln of non-positive value");
                    return std::log(x);
                case UnaryOp::sqrt:
                    if (x < 0.0) domain_fault(node, "sqrt of negative value");
                    return std::sqrt(x);
                case UnaryOp::abs: return std::abs(x);
            }
            break;
        }
        case Node::Kind::binary: {
            const double l = eval(*node.lhs, bindings);
            const double r = eval(*node.rhs, bindings);
            switch (node.binary) {
                case BinaryOp::add: return checked(node, l + r);
                case BinaryOp::sub: return checked(node, l - r);
                case BinaryOp::mul: return checked(node, l * r);
                case BinaryOp::div:
                    if (r == 0.0) domain_fault(node, "division by zero");
                    return checked(node, l / r);
                case BinaryOp::pow:
                    if (l < 0.0 && r != std::trunc(r)) {
                        domain_fault(node, "non-integer power of negative base");
                    }
                    if (l == 0.0 && r < 0.0) domain_fault(node, "negative power of zero");
                    return checked(node, std::pow(l, r));
            }
            break;
        }
    }
    fail(ErrorKind::DomainFault, "malformed expression node", node.offset);
}

// ---------------------------------------------------------------------------
// Structure helpers

bool references(const Node& node, Var var) {
    switch (node.kind) {
        case Node::Kind::constant: return false;
        case Node::Kind::variable: return node.var == var;
        case Node::Kind::unary: return references(*node.lhs, var);
        case Node::Kind::binary: return references(*node.lhs, var) || references(*node.rhs, var);
    }
    return false;
}

bool structurally_equal(const Node& lhs, const Node& rhs) {
    if (lhs.kind != rhs.kind) return false;
    switch (lhs.kind) {
        case Node::Kind::constant: return lhs.value == rhs.value;
        case Node::Kind::variable: return lhs.var == rhs.var;
        case Node::Kind::unary:
            return lhs.unary == rhs.unary && structurally_equal(*lhs.lhs, *rhs.lhs);
        case Node::Kind::binary:
            return lhs.binary == rhs.binary && structurally_equal(*lhs.lhs, *rhs.lhs) &&
                   structurally_equal(*lhs.rhs, *rhs.rhs);
    }
    return false;
}

namespace {

std::string_view unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::neg: return "-";
        case UnaryOp::sin: return "sin";
        case UnaryOp::cos: return "cos";
        case UnaryOp::exp: return "exp";
        case UnaryOp::ln: return "ln";
        case UnaryOp::sqrt: return "sqrt";
        case UnaryOp::abs: return "abs";
    }
    return "?";
}

char binary_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return '+';
        case BinaryOp::sub: return '-';
        case BinaryOp::mul: return '*';
        case BinaryOp::div: return '/';
        case BinaryOp::pow: return '^';
    }
    return '?';
}

}  // namespace

std::string print(const Node& node) {
    switch (node.kind) {
        case Node::Kind::constant: {
            char buf[32];
            if (std::signbit(node.value)) {
                std::snprintf(buf, sizeof buf, "(-%.17g)", -node.value);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", node.value);
            }
            return buf;
        }
        case Node::Kind::variable:
            return std::string(to_string(node.var));
        case Node::Kind::unary:
            if (node.unary == UnaryOp::neg) {
                // Keep neg(c) distinct from the constant -c, which prints as "(-c)".
                const bool bare = node.lhs->kind == Node::Kind::constant && !std::signbit(node.lhs->value);
                return bare ? "(-(" + print(*node.lhs) + "))" : "(-" + print(*node.lhs) + ")";
            }
            return std::string(unary_name(node.unary)) + "(" + print(*node.lhs) + ")";
        case Node::Kind::binary:
            return "(" + print(*node.lhs) + binary_symbol(node.binary) + print(*node.rhs) + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

bool is_const(const NodePtr& n, double v) {
    return n->kind == Node::Kind::constant && n->value == v;
}

NodePtr fold_unary(UnaryOp op, NodePtr x, std::size_t at) {
    if (op == UnaryOp::neg && x->kind == Node::Kind::constant) return make_constant(-x->value, at);
    if (op == UnaryOp::neg && x->kind == Node::Kind::unary && x->unary == UnaryOp::neg) return x->lhs;
    return make_unary(op, std::move(x), at);
}

NodePtr fold(BinaryOp op, NodePtr l, NodePtr r, std::size_t at) {
    if (l->kind == Node::Kind::constant && r->kind == Node::Kind::constant) {
        double v = 0.0;
        switch (op) {
            case BinaryOp::add: v = l->value + r->value; break;
            case BinaryOp::sub: v = l->value - r->value; break;
            case BinaryOp::mul: v = l->value * r->value; break;
            case BinaryOp::div: v = r->value == 0.0 ? NAN : l->value / r->value; break;
            case BinaryOp::pow: v = std::pow(l->value, r->value); break;
        }
        if (std::isfinite(v)) return make_constant(v, at);
    }
    switch (op) {
        case BinaryOp::add:
            if (is_const(l, 0.0)) return r;
            if (is_const(r, 0.0)) return l;
            break;
        case BinaryOp::sub:
            if (is_const(r, 0.0)) return l;
            if (is_const(l, 0.0)) return fold_unary(UnaryOp::neg, r, at);
            break;
        case BinaryOp::mul:
            if (is_const(l, 0.0) || is_const(r, 0.0)) return make_constant(0.0, at);
            if (is_const(l, 1.0)) return r;
            if (is_const(r, 1.0)) return l;
            if (is_const(l, -1.0)) return fold_unary(UnaryOp::neg, r, at);
            if (is_const(r, -1.0)) return fold_unary(UnaryOp::neg, l, at);
            break;
        case BinaryOp::div:
            if (is_const(l, 0.0)) return make_constant(0.0, at);
            if (is_const(r, 1.0)) return l;
            break;
        case BinaryOp::pow:
            if (is_const(r, 1.0)) return l;
            if (is_const(r, 0.0)) return make_constant(1.0, at);
            break;
    }
    return make_binary(op, std::move(l), std::move(r), at);
}

}  // namespace

NodePtr derivative(const NodePtr& node, Var var) {
    const std::size_t at = node->offset;
    switch (node->kind) {
        case Node::Kind::constant:
            return make_constant(0.0, at);
        case Node::Kind::variable:
            return make_constant(node->var == var ? 1.0 : 0.0, at);
        case Node::Kind::unary: {
            const NodePtr& x = node->lhs;
            NodePtr dx = derivative(x, var);
            if (is_const(dx, 0.0)) return dx;
            NodePtr outer;
            switch (node->unary) {
                case UnaryOp::neg: return fold_unary(UnaryOp::neg, dx, at);
                case UnaryOp::sin: outer = make_unary(UnaryOp::cos, x, at); break;
                case UnaryOp::cos:
                    outer = fold_unary(UnaryOp::neg, make_unary(UnaryOp::sin, x, at), at);
                    break;
                case UnaryOp::exp: outer = node; break;
                case UnaryOp::ln: return fold(BinaryOp::div, dx, x, at);
                case UnaryOp::sqrt:
                    return fold(BinaryOp::div, dx,
                                fold(BinaryOp::mul, make_constant(2.0, at), node, at), at);
                case UnaryOp::abs:
                    outer = fold(BinaryOp::div, x, node, at);
                    break;
            }
            return fold(BinaryOp::mul, outer, dx, at);
        }
        case Node::Kind::binary: {
            const NodePtr& l = node->lhs;
            const NodePtr& r = node->rhs;
            NodePtr dl = derivative(l, var);
            NodePtr dr = derivative(r, var);
            switch (node->binary) {
                case BinaryOp::add: return fold(BinaryOp::add, dl, dr, at);
                case BinaryOp::sub: return fold(BinaryOp::sub, dl, dr, at);
                case BinaryOp::mul:
                    return fold(BinaryOp::add, fold(BinaryOp::mul, dl, r, at),
                                fold(BinaryOp::mul, l, dr, at), at);
                case BinaryOp::div:
                    return fold(BinaryOp::div,
                                fold(BinaryOp::sub, fold(BinaryOp::mul, dl, r, at),
                                     fold(BinaryOp::mul, l, dr, at), at),
                                fold(BinaryOp::pow, r, make_constant(2.0, at), at), at);
                case BinaryOp::pow: {
                    const bool base_varies = references(*l, var);
                    const bool exp_varies = references(*r, var);
                    if (!exp_varies) {
                        if (!base_varies) return make_constant(0.0, at);
                        NodePtr reduced = fold(BinaryOp::sub, r, make_constant(1.0, at), at);
                        return fold(BinaryOp::mul,
                                    fold(BinaryOp::mul, r, fold(BinaryOp::pow, l, reduced, at), at),
                                    dl, at);
                    }
                    NodePtr log_base = make_unary(UnaryOp::ln, l, at);
                    if (!base_varies) {
                        return fold(BinaryOp::mul, fold(BinaryOp::mul, node, log_base, at), dr, at);
                    }
                    NodePtr inner = fold(BinaryOp::add, fold(BinaryOp::mul, dr, log_base, at),
                                         fold(BinaryOp::div, fold(BinaryOp::mul, r, dl, at), l, at),
                                         at);
                    return fold(BinaryOp::mul, node, inner, at);
                }
            }
            break;
        }
    }
    return make_constant(0.0, at);
}

// ---------------------------------------------------------------------------
// Expression

Expression::Expression(std::string source, const VarSet& allowed)
    : root_(parse(source, allowed)), source_(std::move(source)) {}

Expression::Expression(NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expression::at_t(double t) const { return eval(*root_, Bindings{}.set(Var::t, t)); }

Expression Expression::derivative(Var var) const {
    NodePtr d = expr::derivative(root_, var);
    std::string text = print(*d);
    return Expression(std::move(d), std::move(text));
}

bool Expression::is_constant() const {
    return !references(*root_, Var::t) && !references(*root_, Var::u) &&
           !references(*root_, Var::alpha);
}

}  // namespace fracvar::expr
