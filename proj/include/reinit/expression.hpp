#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "reinit/errors.hpp"
#include "reinit/grid.hpp"

namespace reinit {

// Scalar expression in the variables x, y with +, -, *, /, ^ (right
// associative), unary minus, sin, cos, exp, sqrt, numeric literals and pi.
// Unknown identifiers are rejected at parse time with their position.
class Expression {
public:
    static Expression parse(const std::string& source) {
        Parser p{source, 0};
        Node root = p.parse_expr();
        p.skip_ws();
        if (p.pos != source.size())
            throw ConfigError("unexpected character '" +
                              std::string(1, source[p.pos]) +
                              "' at position " + std::to_string(p.pos) +
                              " in expression");
        Expression e;
        e.source_ = source;
        e.root_ = std::move(root);
        return e;
    }

    double eval(const Point& at) const { return eval_node(root_, at); }
    bool uses_y() const { return uses(root_, Op::VarY); }
    const std::string& source() const { return source_; }

    bool operator==(const Expression& o) const { return source_ == o.source_; }

private:
    enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };

    struct NodeData;
    using Node = std::shared_ptr<const NodeData>;
    struct NodeData {
        Op op;
        double value = 0.0;
        Node a, b;
    };

    static Node make(Op op, Node a = nullptr, Node b = nullptr, double v = 0.0) {
        return std::make_shared<const NodeData>(NodeData{op, v, std::move(a), std::move(b)});
    }

    static double eval_node(const Node& n, const Point& at) {
        switch (n->op) {
            case Op::Const: return n->value;
            case Op::VarX: return at[0];
            case Op::VarY: return at[1];
            case Op::Add: return eval_node(n->a, at) + eval_node(n->b, at);
            case Op::Sub: return eval_node(n->a, at) - eval_node(n->b, at);
            case Op::Mul: return eval_node(n->a, at) * eval_node(n->b, at);
            case Op::Div: return eval_node(n->a, at) / eval_node(n->b, at);
            case Op::Pow: return std::pow(eval_node(n->a, at), eval_node(n->b, at));
            case Op::Neg: return -eval_node(n->a, at);
            case Op::Sin: return std::sin(eval_node(n->a, at));
            case Op::Cos: return std::cos(eval_node(n->a, at));
            case Op::Exp: return std::exp(eval_node(n->a, at));
            case Op::Sqrt: return std::sqrt(eval_node(n->a, at));
        }
        return 0.0;
    }

    static bool uses(const Node& n, Op what) {
        if (!n) return false;
        if (n->op == what) return true;
        return uses(n->a, what) || uses(n->b, what);
    }

    struct Parser {
        const std::string& s;
        std::size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }

        bool consume(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        [[noreturn]] void fail(const std::string& what) {
            throw ConfigError(what + " at position " + std::to_string(pos) +
                              " in expression");
        }

        Node parse_expr() {
            Node lhs = parse_term();
            for (;;) {
                if (consume('+'))
                    lhs = make(Op::Add, lhs, parse_term());
                else if (consume('-'))
                    lhs = make(Op::Sub, lhs, parse_term());
                else
                    return lhs;
            }
        }

        Node parse_term() {
            Node lhs = parse_unary();
            for (;;) {
                if (consume('*'))
                    lhs = make(Op::Mul, lhs, parse_unary());
                else if (consume('/'))
                    lhs = make(Op::Div, lhs, parse_unary());
                else
                    return lhs;
            }
        }

        // '^' binds tighter than unary minus (-x^2 is -(x^2)) and is right
        // associative; the exponent may itself carry a sign.
        Node parse_unary() {
            if (consume('-')) return make(Op::Neg, parse_unary());
            return parse_power();
        }

        Node parse_power() {
            Node base = parse_primary();
            if (consume('^')) return make(Op::Pow, base, parse_unary());
            return base;
        }

        Node parse_primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of expression");
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                Node inner = parse_expr();
                if (!consume(')')) fail("expected ')'");
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
            fail(std::string("unexpected character '") + c + "'");
        }

        Node parse_number() {
            std::size_t end = pos;
            while (end < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.'))
                ++end;
            if (end < s.size() && (s[end] == 'e' || s[end] == 'E')) {
                std::size_t e = end + 1;
                if (e < s.size() && (s[e] == '+' || s[e] == '-')) ++e;
                if (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) {
                    ++e;
                    while (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
                    end = e;
                }
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(s.substr(pos, end - pos), &used);
                if (used != end - pos) fail("malformed number");
                pos = end;
                return make(Op::Const, nullptr, nullptr, v);
            } catch (const std::exception&) {
                fail("malformed number");
            }
        }

        Node parse_ident() {
            std::size_t end = pos;
            while (end < s.size() &&
                   std::isalpha(static_cast<unsigned char>(s[end])))
                ++end;
            const std::string name = s.substr(pos, end - pos);
            const std::size_t at = pos;
            pos = end;
            if (name == "x") return make(Op::VarX);
            if (name == "y") return make(Op::VarY);
            if (name == "pi") return make(Op::Const, nullptr, nullptr, std::acos(-1.0));
            Op fn;
            if (name == "sin") fn = Op::Sin;
            else if (name == "cos") fn = Op::Cos;
            else if (name == "exp") fn = Op::Exp;
            else if (name == "sqrt") fn = Op::Sqrt;
            else
                throw ConfigError("unknown identifier '" + name + "' at position " +
                                  std::to_string(at) + " in expression");
            if (!consume('(')) fail("expected '(' after function name");
            Node arg = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return make(fn, arg);
        }
    };

    std::string source_;
    Node root_;
};

}  // namespace reinit
