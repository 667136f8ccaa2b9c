#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracvar::expr {

enum class Var : std::size_t { t = 0, u = 1, alpha = 2 };
inline constexpr std::size_t kVarCount = 3;

std::string_view to_string(Var v) noexcept;

/// Set of variable names a parse slot may reference.
class VarSet {
public:
    VarSet() = default;
    VarSet(std::initializer_list<Var> vars);
    [[nodiscard]] bool contains(Var v) const noexcept { return bits_[static_cast<std::size_t>(v)]; }
    void insert(Var v) noexcept { bits_[static_cast<std::size_t>(v)] = true; }

private:
    std::array<bool, kVarCount> bits_{};
};

enum class UnaryOp { neg, sin, cos, exp, ln, sqrt, abs };
enum class BinaryOp { add, sub, mul, div, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable AST node. `offset` is the byte position in the source text
/// (or of the node it was derived from).
struct Node {
    enum class Kind { constant, variable, unary, binary };

    Kind kind;
    double value = 0.0;
    Var var = Var::t;
    UnaryOp unary = UnaryOp::neg;
    BinaryOp binary = BinaryOp::add;
    NodePtr lhs;
    NodePtr rhs;
    std::size_t offset = 0;
};

NodePtr make_constant(double v, std::size_t offset = 0);
NodePtr make_variable(Var v, std::size_t offset = 0);
NodePtr make_unary(UnaryOp op, NodePtr arg, std::size_t offset = 0);
NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs, std::size_t offset = 0);

/// Variable values for evaluation; unset entries raise UnboundVariable.
class Bindings {
public:
    Bindings() = default;
    Bindings& set(Var v, double value) noexcept {
        values_[static_cast<std::size_t>(v)] = value;
        return *this;
    }
    [[nodiscard]] const std::optional<double>& get(Var v) const noexcept {
        return values_[static_cast<std::size_t>(v)];
    }

private:
    std::array<std::optional<double>, kVarCount> values_{};
};

/// Parses `source` honoring the grammar
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := primary ('^' unary)?          (right-associative)
///   primary := number | pi | var | fn '(' expr ')' | '(' expr ')'
/// with fn in {sin, cos, exp, ln, sqrt, abs}.
NodePtr parse(std::string_view source, const VarSet& allowed);

double eval(const Node& node, const Bindings& bindings);

/// Symbolic derivative with light constant folding.
NodePtr derivative(const NodePtr& node, Var var);

/// Source text that reparses to a structurally identical tree.
std::string print(const Node& node);

bool structurally_equal(const Node& lhs, const Node& rhs);

/// True when the tree references `var`.
bool references(const Node& node, Var var);

/// Parsed expression bundled with its source text.
class Expression {
public:
    Expression(std::string source, const VarSet& allowed);
    Expression(NodePtr root, std::string source);

    [[nodiscard]] double operator()(const Bindings& b) const { return eval(*root_, b); }
    [[nodiscard]] double at_t(double t) const;
    [[nodiscard]] Expression derivative(Var var) const;
    [[nodiscard]] const NodePtr& root() const noexcept { return root_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] bool is_constant() const;

private:
    NodePtr root_;
    std::string source_;
};

}  // namespace fracvar::expr
