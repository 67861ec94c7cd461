#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "gcalc/config.hpp"
#include "gcalc/expr.hpp"

namespace gcalc {

// Expression reader. Grammar:
//
//   expr     := ["-"] term (("+" | "-") term)*
//   term     := factor (("*" | "/") factor)*
//   factor   := atom ("^" rational)?
//   atom     := number | "eps" | "x" | "t"
//             | "alpha" "(" rational ")"
//             | ident "(" expr ("," expr)* ")"
//             | "idem" "(" string "," string ")"
//             | "(" expr ")"
//
// The rational after "^" is greedy: x^2/3 means x^(2/3); write (x^2)/3 for
// the quotient. delta and rho accept an optional trailing integer argument
// selecting a derivative order: delta(x, 2) is the second delta derivative.

namespace parsedet {

enum class Tok { Number, Ident, String, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double value = 0.0;
    bool integral = false;  // Number made of digits only
    int line = 1, column = 1;
};

inline const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::String: return "string";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::End: return "end of input";
    }
    return "?";
}

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto bump = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; ++j, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            bump(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            bool integral = true;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                integral = false;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    integral = false;
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.kind = Tok::Number;
            t.text = src.substr(i, j - i);
            t.value = std::stod(t.text);
            t.integral = integral;
            bump(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = Tok::Ident;
            t.text = src.substr(i, j - i);
            bump(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"') ++j;
            if (j >= src.size())
                throw ParseError("unterminated string literal", line, col);
            t.kind = Tok::String;
            t.text = src.substr(i + 1, j - i - 1);
            bump(j - i + 1);
            out.push_back(std::move(t));
            continue;
        }
        switch (c) {
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '*': t.kind = Tok::Star; break;
            case '/': t.kind = Tok::Slash; break;
            case '^': t.kind = Tok::Caret; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case ',': t.kind = Tok::Comma; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = c;
        bump(1);
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.column = col;
    out.push_back(std::move(end));
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, int mollifier_order)
        : toks_(std::move(toks)), q_(mollifier_order) {}

    ExprPtr run() {
        ExprPtr e = expr();
        if (peek().kind != Tok::End) fail("expected '+', '-', '*', '/', '^' or end of input");
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        throw ParseError(expected + "; got " + tok_name(t.kind) +
                             (t.text.empty() ? "" : " '" + t.text + "'"),
                         t.line, t.column);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what);
        take();
    }

    ExprPtr expr() {
        bool neg = false;
        if (peek().kind == Tok::Minus) {
            take();
            neg = true;
        }
        ExprPtr acc = term();
        if (neg) acc = make_mul({make_num(-1.0), acc});
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const bool minus = take().kind == Tok::Minus;
            ExprPtr rhs = term();
            acc = minus ? make_sub(acc, rhs) : make_add({acc, rhs});
        }
        return acc;
    }

    ExprPtr term() {
        ExprPtr acc = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const bool div = take().kind == Tok::Slash;
            ExprPtr rhs = factor();
            acc = div ? make_div(acc, rhs) : make_mul({acc, rhs});
        }
        return acc;
    }

    ExprPtr factor() {
        ExprPtr base = atom();
        if (peek().kind == Tok::Caret) {
            take();
            return make_pow(base, rational());
        }
        return base;
    }

    // Greedy rational: [-] int [/ int], where the "/ int" continuation is
    // taken only when an integer actually follows.
    QQ rational() {
        bool neg = false;
        if (peek().kind == Tok::Minus) {
            take();
            neg = true;
        }
        if (peek().kind != Tok::Number || !peek().integral)
            fail("expected integer numerator of a rational");
        QQ num(boost::multiprecision::cpp_int(take().text));
        if (peek().kind == Tok::Slash && peek(1).kind == Tok::Number && peek(1).integral) {
            take();
            const Token& den = take();
            QQ d(boost::multiprecision::cpp_int(den.text));
            if (d == 0) throw ParseError("rational with zero denominator", den.line, den.column);
            num /= d;
        }
        return neg ? -num : num;
    }

    int small_int_arg(const char* what) {
        if (peek().kind != Tok::Number || !peek().integral || peek().text.size() > 3)
            fail(std::string("expected ") + what);
        return static_cast<int>(take().value);
    }

    std::vector<ExprPtr> call_args() {
        expect(Tok::LParen, "'(' after function name");
        std::vector<ExprPtr> args;
        args.push_back(expr());
        while (peek().kind == Tok::Comma) {
            take();
            args.push_back(expr());
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    void arity(const std::string& name, const std::vector<ExprPtr>& args, std::size_t n,
               const Token& at) const {
        if (args.size() != n)
            throw ParseError(name + " takes " + std::to_string(n) + " argument" +
                                 (n == 1 ? "" : "s") + ", got " + std::to_string(args.size()),
                             at.line, at.column);
    }

    ExprPtr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                return make_num(take().value);
            case Tok::LParen: {
                take();
                ExprPtr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                break;
            default:
                fail("expected a number, identifier or '('");
        }
        const Token name = take();
        const std::string& id = name.text;
        if (id == "eps") return make_gauge();
        if (id == "x") return make_var(0);
        if (id == "t") return make_var(1);
        if (id == "alpha") {
            expect(Tok::LParen, "'(' after alpha");
            QQ r = rational();
            expect(Tok::RParen, "')'");
            return make_alpha(r);
        }
        if (id == "idem") {
            expect(Tok::LParen, "'(' after idem");
            if (peek().kind != Tok::String) fail("expected preperiod string");
            const Token pre = take();
            expect(Tok::Comma, "','");
            if (peek().kind != Tok::String) fail("expected period string");
            const Token per = take();
            expect(Tok::RParen, "')'");
            try {
                return make_idem(Idempotent(pre.text, per.text));
            } catch (const Error& e) {
                throw ParseError(e.what(), name.line, name.column);
            }
        }
        if (id == "delta" || id == "rho") {
            expect(Tok::LParen, "'(' after function name");
            ExprPtr arg = expr();
            int order = 0;
            if (peek().kind == Tok::Comma) {
                take();
                order = small_int_arg("derivative order (small integer)");
            }
            expect(Tok::RParen, "')'");
            if (id == "delta") return make_delta(order, arg);
            return make_kernel({KernelBase::Rho, order, q_}, arg);
        }
        try {
            if (id == "sin") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_fun(FunTag::Sin, a[0]);
            }
            if (id == "cos") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_fun(FunTag::Cos, a[0]);
            }
            if (id == "exp") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_fun(FunTag::Exp, a[0]);
            }
            if (id == "atan") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_fun(FunTag::Atan, a[0]);
            }
            if (id == "Rho") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_kernel({KernelBase::Step, 0, q_}, a[0]);
            }
            if (id == "abskernel") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_kernel({KernelBase::Abs, 0, q_}, a[0]);
            }
            if (id == "heaviside") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_node(ExprKind::Heaviside, a[0]);
            }
            if (id == "sign") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_node(ExprKind::SignFn, a[0]);
            }
            if (id == "abs") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_node(ExprKind::AbsFn, a[0]);
            }
            if (id == "quanta") {
                auto a = call_args();
                arity(id, a, 1, name);
                return make_node(ExprKind::Quanta, a[0]);
            }
            if (id == "interleave") {
                auto a = call_args();
                return make_interleave(std::move(a));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), name.line, name.column);
        }
        throw ParseError("unknown identifier '" + id +
                             "'; expected one of sin, cos, exp, atan, rho, Rho, delta, "
                             "heaviside, sign, abs, quanta, interleave, idem, alpha, eps, x, t",
                         name.line, name.column);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int q_;
};

}  // namespace parsedet

/// Parses an expression. Kernel nodes produced by rho/Rho/abskernel bind the
/// given mollifier order.
inline ExprPtr parse_expr(const std::string& src,
                          int mollifier_order = default_config().mollifier_order) {
    return parsedet::Parser(parsedet::lex(src), mollifier_order).run();
}

}  // namespace gcalc
