#ifndef PATHLR_EXPR_HPP
#define PATHLR_EXPR_HPP

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathlr {

/// Error in the arithmetic-expression text, with the offending position.
class expr_error : public std::invalid_argument {
public:
    expr_error(const std::string& what, size_t pos)
        : std::invalid_argument(what + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    size_t position;
};

/// Parsed arithmetic expression over the variables x and t.
///
/// Grammar: + - * / ^ (right-associative), unary minus, parentheses,
/// functions sin cos tan exp log sqrt abs tanh pow(a,b) min max, and the
/// constant pi.
class Expression {
public:
    Expression() = default;

    static Expression parse(const std::string& text) {
        Parser p{text, 0};
        Expression e;
        e.text_ = text;
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size()) throw expr_error("unexpected trailing input", p.pos);
        return e;
    }

    double operator()(double x, double t = 0.0) const {
        if (!root_) throw std::logic_error("empty expression");
        return root_->eval(x, t);
    }

    bool empty() const { return !root_; }
    const std::string& text() const { return text_; }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(double x, double t) const = 0;
    };
    using NodePtr = std::shared_ptr<const Node>;

    struct Const : Node {
        double v;
        explicit Const(double v) : v(v) {}
        double eval(double, double) const override { return v; }
    };
    struct VarX : Node {
        double eval(double x, double) const override { return x; }
    };
    struct VarT : Node {
        double eval(double, double t) const override { return t; }
    };
    struct Unary : Node {
        NodePtr a;
        explicit Unary(NodePtr a) : a(std::move(a)) {}
        double eval(double x, double t) const override { return -a->eval(x, t); }
    };
    struct Binary : Node {
        char op;
        NodePtr a, b;
        Binary(char op, NodePtr a, NodePtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
        double eval(double x, double t) const override {
            const double lhs = a->eval(x, t);
            const double rhs = b->eval(x, t);
            switch (op) {
                case '+': return lhs + rhs;
                case '-': return lhs - rhs;
                case '*': return lhs * rhs;
                case '/': return lhs / rhs;
                default: return std::pow(lhs, rhs);
            }
        }
    };
    struct Call : Node {
        double (*fn1)(double) = nullptr;
        double (*fn2)(double, double) = nullptr;
        NodePtr a, b;
        double eval(double x, double t) const override {
            return fn1 ? fn1(a->eval(x, t)) : fn2(a->eval(x, t), b->eval(x, t));
        }
    };

    struct Parser {
        const std::string& s;
        size_t pos;

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

        NodePtr parse_expr() {
            NodePtr lhs = parse_term();
            for (;;) {
                if (consume('+'))
                    lhs = std::make_shared<Binary>('+', lhs, parse_term());
                else if (consume('-'))
                    lhs = std::make_shared<Binary>('-', lhs, parse_term());
                else
                    return lhs;
            }
        }
        NodePtr parse_term() {
            NodePtr lhs = parse_unary();
            for (;;) {
                if (consume('*'))
                    lhs = std::make_shared<Binary>('*', lhs, parse_unary());
                else if (consume('/'))
                    lhs = std::make_shared<Binary>('/', lhs, parse_unary());
                else
                    return lhs;
            }
        }
        NodePtr parse_unary() {
            if (consume('-')) return std::make_shared<Unary>(parse_unary());
            if (consume('+')) return parse_unary();
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr base = parse_atom();
            if (consume('^')) return std::make_shared<Binary>('^', base, parse_unary());
            return base;
        }
        NodePtr parse_atom() {
            skip_ws();
            if (pos >= s.size()) throw expr_error("unexpected end of expression", pos);
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                NodePtr inner = parse_expr();
                if (!consume(')')) throw expr_error("missing ')'", pos);
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
            throw expr_error(std::string("unexpected character '") + c + "'", pos);
        }
        NodePtr parse_number() {
            size_t end = 0;
            double v = 0.0;
            try {
                v = std::stod(s.substr(pos), &end);
            } catch (const std::exception&) {
                throw expr_error("malformed number", pos);
            }
            pos += end;
            return std::make_shared<Const>(v);
        }
        NodePtr parse_ident() {
            const size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            const std::string name = s.substr(start, pos - start);
            if (name == "x") return std::make_shared<VarX>();
            if (name == "t") return std::make_shared<VarT>();
            if (name == "pi") return std::make_shared<Const>(M_PI);

            static const struct {
                const char* name;
                double (*fn)(double);
            } kFns1[] = {{"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
                         {"exp", std::exp}, {"log", std::log},   {"sqrt", std::sqrt},
                         {"abs", std::fabs}, {"tanh", std::tanh}};
            static const struct {
                const char* name;
                double (*fn)(double, double);
            } kFns2[] = {{"pow", std::pow}, {"min", std::fmin}, {"max", std::fmax}};

            for (const auto& f : kFns1) {
                if (name == f.name) {
                    if (!consume('(')) throw expr_error("expected '(' after " + name, pos);
                    auto call = std::make_shared<Call>();
                    call->fn1 = f.fn;
                    call->a = parse_expr();
                    if (!consume(')')) throw expr_error("missing ')'", pos);
                    return call;
                }
            }
            for (const auto& f : kFns2) {
                if (name == f.name) {
                    if (!consume('(')) throw expr_error("expected '(' after " + name, pos);
                    auto call = std::make_shared<Call>();
                    call->fn2 = f.fn;
                    call->a = parse_expr();
                    if (!consume(',')) throw expr_error("expected ',' in " + name, pos);
                    call->b = parse_expr();
                    if (!consume(')')) throw expr_error("missing ')'", pos);
                    return call;
                }
            }
            throw expr_error("unknown identifier '" + name + "'", start);
        }
    };

    NodePtr root_;
    std::string text_;
};

}  // namespace pathlr

#endif  // PATHLR_EXPR_HPP
