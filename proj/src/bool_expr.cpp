#include "mpskit/bool_expr.hpp"

#include <cctype>

#include "mpskit/error.hpp"

namespace mpskit {

std::unique_ptr<BoolExpr> BoolExpr::make_var(std::size_t idx) {
    auto e = std::make_unique<BoolExpr>();
    e->node = Node::Var;
    e->var = idx;
    return e;
}

std::unique_ptr<BoolExpr> BoolExpr::make_const(bool v) {
    auto e = std::make_unique<BoolExpr>();
    e->node = Node::Const;
    e->value = v;
    return e;
}

std::unique_ptr<BoolExpr> BoolExpr::make_not(std::unique_ptr<BoolExpr> inner) {
    auto e = std::make_unique<BoolExpr>();
    e->node = Node::Not;
    e->lhs = std::move(inner);
    return e;
}

std::unique_ptr<BoolExpr> BoolExpr::make_and(std::unique_ptr<BoolExpr> a,
                                             std::unique_ptr<BoolExpr> b) {
    auto e = std::make_unique<BoolExpr>();
    e->node = Node::And;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

std::unique_ptr<BoolExpr> BoolExpr::make_or(std::unique_ptr<BoolExpr> a,
                                            std::unique_ptr<BoolExpr> b) {
    auto e = std::make_unique<BoolExpr>();
    e->node = Node::Or;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

bool BoolExpr::eval(const std::vector<int>& bits) const {
    switch (node) {
        case Node::Var:
            return bits[var - 1] != 0;
        case Node::Const:
            return value;
        case Node::Not:
            return !lhs->eval(bits);
        case Node::And:
            return lhs->eval(bits) && rhs->eval(bits);
        case Node::Or:
            return lhs->eval(bits) || rhs->eval(bits);
    }
    return false;
}

std::size_t BoolExpr::max_var() const {
    switch (node) {
        case Node::Var:
            return var;
        case Node::Const:
            return 0;
        case Node::Not:
            return lhs->max_var();
        case Node::And:
        case Node::Or:
            return std::max(lhs->max_var(), rhs->max_var());
    }
    return 0;
}

namespace {

enum class Tok { Var, Not, And, Or, LParen, RParen, Zero, One, End };

struct Token {
    Tok kind;
    std::size_t var = 0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        const std::size_t off = pos_;
        if (pos_ >= text_.size()) return {Tok::End, 0, off};

        const unsigned char c = text_[pos_];
        if (c == '(') { ++pos_; return {Tok::LParen, 0, off}; }
        if (c == ')') { ++pos_; return {Tok::RParen, 0, off}; }
        if (c == '!') { ++pos_; return {Tok::Not, 0, off}; }
        if (c == '&') { ++pos_; if (peek() == '&') ++pos_; return {Tok::And, 0, off}; }
        if (c == '|') { ++pos_; if (peek() == '|') ++pos_; return {Tok::Or, 0, off}; }
        if (c == '0') { ++pos_; return {Tok::Zero, 0, off}; }
        if (c == '1') { ++pos_; return {Tok::One, 0, off}; }

        // UTF-8 logical symbols: ¬ (C2 AC), ∧ (E2 88 A7), ∨ (E2 88 A8).
        if (c == 0xC2 && pos_ + 1 < text_.size() &&
            static_cast<unsigned char>(text_[pos_ + 1]) == 0xAC) {
            pos_ += 2;
            return {Tok::Not, 0, off};
        }
        if (c == 0xE2 && pos_ + 2 < text_.size() &&
            static_cast<unsigned char>(text_[pos_ + 1]) == 0x88) {
            const unsigned char third = text_[pos_ + 2];
            if (third == 0xA7) { pos_ += 3; return {Tok::And, 0, off}; }
            if (third == 0xA8) { pos_ += 3; return {Tok::Or, 0, off}; }
        }

        if (std::isalpha(c)) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) {
                ++end;
            }
            std::string word = text_.substr(pos_, end - pos_);
            for (auto& ch : word) ch = static_cast<char>(std::tolower(ch));
            if (word == "not") { pos_ = end; return {Tok::Not, 0, off}; }
            if (word == "and") { pos_ = end; return {Tok::And, 0, off}; }
            if (word == "or") { pos_ = end; return {Tok::Or, 0, off}; }
            if (word == "x") {
                std::size_t digits = end;
                while (digits < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[digits]))) {
                    ++digits;
                }
                if (digits == end) {
                    throw_error(ErrorKind::Parse,
                                "expected variable index after 'X' at byte " +
                                    std::to_string(off));
                }
                const std::size_t idx = std::stoul(text_.substr(end, digits - end));
                if (idx == 0) {
                    throw_error(ErrorKind::Parse,
                                "variable index 0 at byte " + std::to_string(off) +
                                    "; variables start at X1");
                }
                pos_ = digits;
                return {Tok::Var, idx, off};
            }
            throw_error(ErrorKind::Parse,
                        "unknown token '" + word + "' at byte " + std::to_string(off));
        }
        throw_error(ErrorKind::Parse, "unknown token at byte " + std::to_string(off));
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { advance(); }

    std::unique_ptr<BoolExpr> parse() {
        auto e = parse_or();
        if (cur_.kind != Tok::End) {
            throw_error(ErrorKind::Parse, "unexpected trailing token at byte " +
                                              std::to_string(cur_.offset));
        }
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    std::unique_ptr<BoolExpr> parse_or() {
        auto lhs = parse_and();
        while (cur_.kind == Tok::Or) {
            advance();
            lhs = BoolExpr::make_or(std::move(lhs), parse_and());
        }
        return lhs;
    }

    std::unique_ptr<BoolExpr> parse_and() {
        auto lhs = parse_unary();
        while (cur_.kind == Tok::And) {
            advance();
            lhs = BoolExpr::make_and(std::move(lhs), parse_unary());
        }
        return lhs;
    }

    std::unique_ptr<BoolExpr> parse_unary() {
        if (cur_.kind == Tok::Not) {
            advance();
            return BoolExpr::make_not(parse_unary());
        }
        return parse_atom();
    }

    std::unique_ptr<BoolExpr> parse_atom() {
        switch (cur_.kind) {
            case Tok::Var: {
                auto e = BoolExpr::make_var(cur_.var);
                advance();
                return e;
            }
            case Tok::Zero: {
                advance();
                return BoolExpr::make_const(false);
            }
            case Tok::One: {
                advance();
                return BoolExpr::make_const(true);
            }
            case Tok::LParen: {
                advance();
                auto e = parse_or();
                if (cur_.kind != Tok::RParen) {
                    throw_error(ErrorKind::Parse,
                                "expected ')' at byte " + std::to_string(cur_.offset));
                }
                advance();
                return e;
            }
            default:
                throw_error(ErrorKind::Parse,
                            "expected variable, constant, NOT or '(' at byte " +
                                std::to_string(cur_.offset));
        }
    }

    Lexer lexer_;
    Token cur_{Tok::End, 0, 0};
};

}  // namespace

std::unique_ptr<BoolExpr> parse_expr(const std::string& text) {
    return Parser(text).parse();
}

TruthTable table_from_expr(const BoolExpr& expr, std::size_t arity) {
    if (arity == 0) {
        throw_error(ErrorKind::InvalidArgument, "arity must be at least 1");
    }
    if (arity > TruthTable::kMaxArity) {
        throw_error(ErrorKind::SizeGuard,
                    "arity " + std::to_string(arity) + " exceeds the limit of " +
                        std::to_string(TruthTable::kMaxArity));
    }
    if (expr.max_var() > arity) {
        throw_error(ErrorKind::InvalidArgument,
                    "expression uses X" + std::to_string(expr.max_var()) +
                        " but arity is " + std::to_string(arity));
    }
    TruthTable t = TruthTable::zeros(arity);
    std::vector<int> bits(arity, 0);
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        for (std::size_t i = 1; i <= arity; ++i) {
            bits[i - 1] = TruthTable::bit_of(row, i, arity);
        }
        t.outputs[row] = expr.eval(bits);
    }
    return t;
}

}  // namespace mpskit
