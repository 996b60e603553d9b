#include "fpe/expr.hpp"

#include "fpe/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

namespace fpe {

namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x, double y) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Const : Node {
    double v;
    explicit Const(double v_) : v(v_) {}
    double eval(double, double) const override { return v; }
};
struct VarX : Node {
    double eval(double x, double) const override { return x; }
};
struct VarY : Node {
    double eval(double, double y) const override { return y; }
};
struct Unary : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*fn_)(double), NodePtr a) : fn(fn_), arg(std::move(a)) {}
    double eval(double x, double y) const override { return fn(arg->eval(x, y)); }
};
struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char op_, NodePtr l, NodePtr r) : op(op_), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double x, double y) const override {
        const double a = lhs->eval(x, y), b = rhs->eval(x, y);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw ConfigError("expression parse error at offset " + std::to_string(pos_) + ": " + msg);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+')) lhs = std::make_unique<Binary>('+', std::move(lhs), term());
            else if (consume('-')) lhs = std::make_unique<Binary>('-', std::move(lhs), term());
            else return lhs;
        }
    }
    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*')) lhs = std::make_unique<Binary>('*', std::move(lhs), factor());
            else if (consume('/')) lhs = std::make_unique<Binary>('/', std::move(lhs), factor());
            else return lhs;
        }
    }
    NodePtr factor() {
        NodePtr base = unary();
        if (consume('^')) return std::make_unique<Binary>('^', std::move(base), factor());
        return base;
    }
    NodePtr unary() {
        if (consume('-'))
            return std::make_unique<Binary>('-', std::make_unique<Const>(0.0), unary());
        return primary();
    }
    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s_.c_str() + pos_, &end);
            if (end == s_.c_str() + pos_) fail("bad number");
            pos_ = std::size_t(end - s_.c_str());
            return std::make_unique<Const>(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return std::make_unique<VarX>();
            if (name == "y") return std::make_unique<VarY>();
            if (name == "pi") return std::make_unique<Const>(3.14159265358979323846);
            double (*fn)(double) = nullptr;
            if (name == "exp") fn = std::exp;
            else if (name == "sin") fn = std::sin;
            else if (name == "cos") fn = std::cos;
            else fail("unknown identifier '" + name + "'");
            if (!consume('(')) fail("expected '(' after " + name);
            NodePtr a = expr();
            if (!consume(')')) fail("expected ')'");
            return std::make_unique<Unary>(fn, std::move(a));
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

std::function<double(double, double)> compile_expression(const std::string& src) {
    Parser p(src);
    std::shared_ptr<Node> ast(p.parse().release());
    return [ast](double x, double y) { return ast->eval(x, y); };
}

} // namespace fpe
