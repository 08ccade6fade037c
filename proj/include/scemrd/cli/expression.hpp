#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scemrd::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arithmetic in one variable: numeric literals, `x`, + - * /, parentheses.
class Expression {
public:
    static Expression parse(std::string_view text) {
        Parser p{text, 0};
        auto root = p.parse_sum();
        p.skip_space();
        if (p.pos != text.size()) {
            throw ConfigError("expression '" + std::string(text) + "': unexpected '" +
                              std::string(1, text[p.pos]) + "' at offset " + std::to_string(p.pos));
        }
        return Expression(std::string(text), std::move(root));
    }

    double operator()(double x) const { return root_->eval(x); }

    const std::string& text() const noexcept { return text_; }

    /// Polynomial degree in x, or -1 when a division by a non-constant occurs.
    int degree() const { return root_->degree(); }
    bool is_constant() const { return degree() == 0; }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(double x) const = 0;
        virtual int degree() const = 0;
    };
    using NodePtr = std::shared_ptr<const Node>;

    struct Number final : Node {
        explicit Number(double v) : value(v) {}
        double eval(double) const override { return value; }
        int degree() const override { return 0; }
        double value;
    };
    struct Variable final : Node {
        double eval(double x) const override { return x; }
        int degree() const override { return 1; }
    };
    struct Negate final : Node {
        explicit Negate(NodePtr a) : arg(std::move(a)) {}
        double eval(double x) const override { return -arg->eval(x); }
        int degree() const override { return arg->degree(); }
        NodePtr arg;
    };
    struct Binary final : Node {
        Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
        double eval(double x) const override {
            const double a = lhs->eval(x);
            const double b = rhs->eval(x);
            switch (op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                default: return a / b;
            }
        }
        int degree() const override {
            const int a = lhs->degree();
            const int b = rhs->degree();
            if (a < 0 || b < 0) {
                return -1;
            }
            switch (op) {
                case '+':
                case '-': return std::max(a, b);
                case '*': return a + b;
                default: return b == 0 ? a : -1;
            }
        }
        char op;
        NodePtr lhs;
        NodePtr rhs;
    };

    struct Parser {
        std::string_view text;
        std::size_t pos;

        void skip_space() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
        }

        [[noreturn]] void fail(const std::string& what) const {
            throw ConfigError("expression '" + std::string(text) + "': " + what + " at offset " +
                              std::to_string(pos));
        }

        NodePtr parse_sum() {
            NodePtr lhs = parse_product();
            for (;;) {
                skip_space();
                if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
                    const char op = text[pos++];
                    lhs = std::make_shared<Binary>(op, lhs, parse_product());
                } else {
                    return lhs;
                }
            }
        }

        NodePtr parse_product() {
            NodePtr lhs = parse_unary();
            for (;;) {
                skip_space();
                if (pos < text.size() && (text[pos] == '*' || text[pos] == '/')) {
                    const char op = text[pos++];
                    lhs = std::make_shared<Binary>(op, lhs, parse_unary());
                } else {
                    return lhs;
                }
            }
        }

        NodePtr parse_unary() {
            skip_space();
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
                const char op = text[pos++];
                NodePtr arg = parse_unary();
                return op == '-' ? std::make_shared<Negate>(arg) : arg;
            }
            return parse_atom();
        }

        NodePtr parse_atom() {
            skip_space();
            if (pos >= text.size()) {
                fail("unexpected end of input");
            }
            const char c = text[pos];
            if (c == '(') {
                ++pos;
                NodePtr inner = parse_sum();
                skip_space();
                if (pos >= text.size() || text[pos] != ')') {
                    fail("missing ')'");
                }
                ++pos;
                return inner;
            }
            if (c == 'x') {
                ++pos;
                return std::make_shared<Variable>();
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::string tail(text.substr(pos));
                char* end = nullptr;
                const double v = std::strtod(tail.c_str(), &end);
                if (end == tail.c_str()) {
                    fail("bad number");
                }
                pos += static_cast<std::size_t>(end - tail.c_str());
                return std::make_shared<Number>(v);
            }
            fail(std::string("unexpected '") + c + "'");
        }
    };

    Expression(std::string text, NodePtr root) : text_(std::move(text)), root_(std::move(root)) {}

    std::string text_;
    NodePtr root_;
};

}  // namespace scemrd::cli
