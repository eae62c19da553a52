#include "statman/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <type_traits>

#include "statman/special.hpp"

namespace statman {

enum class Op {
    num,
    var,
    neg,
    add,
    sub,
    mul,
    div,
    pw,
    fsin,
    fcos,
    fexp,
    flog,
    fsqrt,
    fdigamma,
    ftrigamma,
};

struct Expression::Node {
    Op op;
    double num = 0.0;
    int var = 0;
    NodePtr a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

template <typename T>
T eval_node(const Node& nd, const std::vector<T>& vars);

template <typename T>
T eval_node(const Node& nd, const std::vector<T>& vars) {
    switch (nd.op) {
        case Op::num:
            if constexpr (std::is_same_v<T, double>)
                return nd.num;
            else
                return Jet::constant(vars[0].n, vars[0].order, nd.num);
        case Op::var:
            return vars[static_cast<std::size_t>(nd.var)];
        case Op::neg:
            return -eval_node(*nd.a, vars);
        case Op::add:
            return eval_node(*nd.a, vars) + eval_node(*nd.b, vars);
        case Op::sub:
            return eval_node(*nd.a, vars) - eval_node(*nd.b, vars);
        case Op::mul:
            return eval_node(*nd.a, vars) * eval_node(*nd.b, vars);
        case Op::div: {
            T den = eval_node(*nd.b, vars);
            if constexpr (std::is_same_v<T, double>) {
                if (den == 0.0) throw DomainError("division by zero");
            }
            return eval_node(*nd.a, vars) / den;
        }
        case Op::pw: {
            if constexpr (std::is_same_v<T, double>) {
                double base = eval_node(*nd.a, vars);
                double e = eval_node(*nd.b, vars);
                double r = std::pow(base, e);
                if (!std::isfinite(r)) throw DomainError("pow out of domain");
                return r;
            } else {
                return pow(eval_node(*nd.a, vars), eval_node(*nd.b, vars));
            }
        }
        case Op::fsin:
            if constexpr (std::is_same_v<T, double>)
                return std::sin(eval_node(*nd.a, vars));
            else
                return sin(eval_node(*nd.a, vars));
        case Op::fcos:
            if constexpr (std::is_same_v<T, double>)
                return std::cos(eval_node(*nd.a, vars));
            else
                return cos(eval_node(*nd.a, vars));
        case Op::fexp:
            if constexpr (std::is_same_v<T, double>)
                return std::exp(eval_node(*nd.a, vars));
            else
                return exp(eval_node(*nd.a, vars));
        case Op::flog: {
            T u = eval_node(*nd.a, vars);
            if constexpr (std::is_same_v<T, double>) {
                if (!(u > 0.0)) throw DomainError("log of non-positive value");
                return std::log(u);
            } else {
                return log(u);
            }
        }
        case Op::fsqrt: {
            T u = eval_node(*nd.a, vars);
            if constexpr (std::is_same_v<T, double>) {
                if (u < 0.0) throw DomainError("sqrt of negative value");
                return std::sqrt(u);
            } else {
                return sqrt(u);
            }
        }
        case Op::fdigamma: {
            T u = eval_node(*nd.a, vars);
            if constexpr (std::is_same_v<T, double>)
                return polygamma(0, u);
            else
                return digamma_jet(u);
        }
        case Op::ftrigamma: {
            T u = eval_node(*nd.a, vars);
            if constexpr (std::is_same_v<T, double>)
                return polygamma(1, u);
            else
                return trigamma_jet(u);
        }
    }
    throw DomainError("corrupt expression node");
}

struct Token {
    enum Kind { number, ident, op, lparen, rparen, comma, end } kind;
    double num = 0.0;
    std::string text;
    char ch = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src.c_str() + i;
            char* endp = nullptr;
            double v = std::strtod(begin, &endp);
            if (endp == begin) throw ParseError("invalid number", i);
            out.push_back({Token::number, v, {}, 0, i});
            i += static_cast<std::size_t>(endp - begin);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Token::ident, 0.0, src.substr(i, j - i), 0, i});
            i = j;
            continue;
        }
        switch (c) {
            case '+':
            case '-':
            case '*':
            case '/':
            case '^':
                out.push_back({Token::op, 0.0, {}, c, i});
                break;
            case '(':
                out.push_back({Token::lparen, 0.0, {}, c, i});
                break;
            case ')':
                out.push_back({Token::rparen, 0.0, {}, c, i});
                break;
            case ',':
                out.push_back({Token::comma, 0.0, {}, c, i});
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        ++i;
    }
    out.push_back({Token::end, 0.0, {}, 0, src.size()});
    return out;
}

const std::map<std::string, Op> kFunctions = {
    {"sin", Op::fsin},         {"cos", Op::fcos},   {"exp", Op::fexp},
    {"log", Op::flog},         {"sqrt", Op::fsqrt}, {"digamma", Op::fdigamma},
    {"trigamma", Op::ftrigamma},
};

class Parser {
  public:
    Parser(std::vector<Token> toks, const std::vector<std::string>& coords)
        : toks_(std::move(toks)), coords_(coords) {}

    NodePtr parse() {
        NodePtr e = expr();
        if (cur().kind != Token::end)
            throw ParseError("trailing input; expected operator or end", cur().pos);
        return e;
    }

  private:
    const Token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }
    bool is_op(char c) const { return cur().kind == Token::op && cur().ch == c; }

    NodePtr expr() {
        NodePtr lhs = term();
        while (is_op('+') || is_op('-')) {
            char c = cur().ch;
            advance();
            lhs = make(c == '+' ? Op::add : Op::sub, lhs, term());
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (is_op('*') || is_op('/')) {
            char c = cur().ch;
            advance();
            lhs = make(c == '*' ? Op::mul : Op::div, lhs, unary());
        }
        return lhs;
    }

    NodePtr unary() {
        if (is_op('-')) {
            advance();
            return make(Op::neg, unary());
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (is_op('^')) {
            advance();
            // right associative; unary binds looser than ^ on the left only
            return make(Op::pw, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        const Token& t = cur();
        if (t.kind == Token::number) {
            advance();
            auto n = make(Op::num);
            const_cast<Node&>(*n).num = t.num;
            return n;
        }
        if (t.kind == Token::lparen) {
            advance();
            NodePtr e = expr();
            if (cur().kind != Token::rparen) throw ParseError("expected ')'", cur().pos);
            advance();
            return e;
        }
        if (t.kind == Token::ident) {
            std::string name = t.text;
            std::size_t at = t.pos;
            advance();
            if (cur().kind == Token::lparen) {
                advance();
                if (name == "pow") {
                    NodePtr a = expr();
                    if (cur().kind != Token::comma)
                        throw ParseError("expected ',' in pow(a, b)", cur().pos);
                    advance();
                    NodePtr b = expr();
                    if (cur().kind != Token::rparen) throw ParseError("expected ')'", cur().pos);
                    advance();
                    return make(Op::pw, a, b);
                }
                auto it = kFunctions.find(name);
                if (it == kFunctions.end())
                    throw ParseError("unknown function '" + name +
                                         "'; expected one of sin cos exp log sqrt pow digamma "
                                         "trigamma",
                                     at);
                NodePtr a = expr();
                if (cur().kind != Token::rparen) throw ParseError("expected ')'", cur().pos);
                advance();
                return make(it->second, a);
            }
            int idx = resolve_var(name);
            if (idx < 0)
                throw ParseError("unknown identifier '" + name +
                                     "'; expected a coordinate or function name",
                                 at);
            auto n = make(Op::var);
            const_cast<Node&>(*n).var = idx;
            return n;
        }
        throw ParseError("expected number, identifier, or '('", t.pos);
    }

    int resolve_var(const std::string& name) const {
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (coords_[i] == name) return static_cast<int>(i);
        // canonical aliases x1..xn
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int k = std::atoi(name.c_str() + 1);
                if (k >= 1 && k <= static_cast<int>(coords_.size())) return k - 1;
            }
        }
        return -1;
    }

    std::vector<Token> toks_;
    const std::vector<std::string>& coords_;
    std::size_t pos_ = 0;
};

}  // namespace

Jet Expression::eval(const Point& p, int order) const {
    if (static_cast<int>(p.size()) != nvars_) throw ShapeError("point dimension mismatch");
    std::vector<Jet> vars;
    vars.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        vars.push_back(Jet::variable(p, static_cast<int>(i), order));
    return eval_node<Jet>(*root_, vars);
}

double Expression::value(const Point& p) const {
    if (static_cast<int>(p.size()) != nvars_) throw ShapeError("point dimension mismatch");
    return eval_node<double>(*root_, p);
}

ScalarField Expression::field() const {
    Expression self = *this;
    return ScalarField::analytic(nvars_,
                                 [self](const Point& p, int order) { return self.eval(p, order); });
}

ScalarField Expression::fd_field(double step_scale) const {
    Expression self = *this;
    return ScalarField::finite_difference(
        nvars_, [self](const Point& p) { return self.value(p); }, step_scale);
}

Expression parse_expression(const std::string& src, const std::vector<std::string>& coords) {
    if (src.empty()) throw ParseError("empty expression", 0);
    Parser parser(tokenize(src), coords);
    return Expression(parser.parse(), static_cast<int>(coords.size()), src);
}

Expression parse_expression(const std::string& src, int nvars) {
    std::vector<std::string> coords;
    for (int i = 1; i <= nvars; ++i) coords.push_back("x" + std::to_string(i));
    return parse_expression(src, coords);
}

}  // namespace statman
