#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mpskit/truth_table.hpp"

namespace mpskit {

// AST for boolean expressions over variables X1..Xn with literals 0/1.
struct BoolExpr {
    enum class Node { Var, Not, And, Or, Const };

    Node node = Node::Const;
    std::size_t var = 0;   // Var: 1-based index
    bool value = false;    // Const
    std::unique_ptr<BoolExpr> lhs;
    std::unique_ptr<BoolExpr> rhs;  // unused for Not

    static std::unique_ptr<BoolExpr> make_var(std::size_t idx);
    static std::unique_ptr<BoolExpr> make_const(bool v);
    static std::unique_ptr<BoolExpr> make_not(std::unique_ptr<BoolExpr> e);
    static std::unique_ptr<BoolExpr> make_and(std::unique_ptr<BoolExpr> a,
                                              std::unique_ptr<BoolExpr> b);
    static std::unique_ptr<BoolExpr> make_or(std::unique_ptr<BoolExpr> a,
                                             std::unique_ptr<BoolExpr> b);

    bool eval(const std::vector<int>& bits) const;
    std::size_t max_var() const;
};

// Grammar: NOT/!/¬ bind tighter than AND/&/∧, which bind tighter than OR/|/∨;
// binary operators are left-associative; parentheses group. Keywords are
// case-insensitive. Errors carry the byte offset of the offending token.
std::unique_ptr<BoolExpr> parse_expr(const std::string& text);

// Exhaustive evaluation over all 2^n rows; n must cover every variable and
// stay within TruthTable::kMaxArity.
TruthTable table_from_expr(const BoolExpr& expr, std::size_t arity);

}  // namespace mpskit
