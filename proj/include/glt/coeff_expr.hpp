#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace glt {

struct SyntaxError : std::runtime_error {
    std::size_t offset;
    SyntaxError(std::size_t off, const std::string& expected)
        : std::runtime_error("syntax error at offset " + std::to_string(off) + ": expected " +
                             expected),
          offset(off) {}
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse tree for coefficient functions a(x1,...,xd).
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' unsigned)?
///   base   := number | 'x' digit | '(' expr ')' | ('sin'|'cos'|'exp') '(' expr ')'
class CoeffExpr {
public:
    enum class Kind { Number, Var, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };

    static CoeffExpr number(double v) { return CoeffExpr(Kind::Number, v, 0); }
    static CoeffExpr var(int index) { return CoeffExpr(Kind::Var, 0.0, index); }
    static CoeffExpr unary(Kind k, CoeffExpr a) {
        CoeffExpr e(k, 0.0, 0);
        e.kids_.push_back(std::make_shared<CoeffExpr>(std::move(a)));
        return e;
    }
    static CoeffExpr binary(Kind k, CoeffExpr a, CoeffExpr b) {
        CoeffExpr e(k, 0.0, 0);
        e.kids_.push_back(std::make_shared<CoeffExpr>(std::move(a)));
        e.kids_.push_back(std::make_shared<CoeffExpr>(std::move(b)));
        return e;
    }
    static CoeffExpr power(CoeffExpr a, unsigned exponent) {
        CoeffExpr e(Kind::Pow, 0.0, static_cast<int>(exponent));
        e.kids_.push_back(std::make_shared<CoeffExpr>(std::move(a)));
        return e;
    }

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    int var_index() const { return aux_; }

    double eval(std::span<const double> x) const {
        switch (kind_) {
        case Kind::Number: return value_;
        case Kind::Var:
            if (aux_ < 1 || static_cast<std::size_t>(aux_) > x.size())
                throw DomainError("variable x" + std::to_string(aux_) + " out of dimension");
            return x[static_cast<std::size_t>(aux_ - 1)];
        case Kind::Add: return kids_[0]->eval(x) + kids_[1]->eval(x);
        case Kind::Sub: return kids_[0]->eval(x) - kids_[1]->eval(x);
        case Kind::Mul: return kids_[0]->eval(x) * kids_[1]->eval(x);
        case Kind::Div: {
            const double den = kids_[1]->eval(x);
            if (den == 0.0) throw DomainError("division by zero in coefficient function");
            return kids_[0]->eval(x) / den;
        }
        case Kind::Pow: {
            double b = kids_[0]->eval(x), r = 1.0;
            for (int i = 0; i < aux_; ++i) r *= b;
            return r;
        }
        case Kind::Sin: return std::sin(kids_[0]->eval(x));
        case Kind::Cos: return std::cos(kids_[0]->eval(x));
        case Kind::Exp: return std::exp(kids_[0]->eval(x));
        }
        throw std::logic_error("CoeffExpr: bad kind");
    }

    double eval1(double x) const {
        const double xs[1] = {x};
        return eval(xs);
    }

    std::string serialize() const {
        switch (kind_) {
        case Kind::Number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", value_);
            return buf;
        }
        case Kind::Var: return "x" + std::to_string(aux_);
        case Kind::Add: return "(" + kids_[0]->serialize() + "+" + kids_[1]->serialize() + ")";
        case Kind::Sub: return "(" + kids_[0]->serialize() + "-" + kids_[1]->serialize() + ")";
        case Kind::Mul: return "(" + kids_[0]->serialize() + "*" + kids_[1]->serialize() + ")";
        case Kind::Div: return "(" + kids_[0]->serialize() + "/" + kids_[1]->serialize() + ")";
        case Kind::Pow: return kids_[0]->serialize() + "^" + std::to_string(aux_);
        case Kind::Sin: return "sin(" + kids_[0]->serialize() + ")";
        case Kind::Cos: return "cos(" + kids_[0]->serialize() + ")";
        case Kind::Exp: return "exp(" + kids_[0]->serialize() + ")";
        }
        throw std::logic_error("CoeffExpr: bad kind");
    }

private:
    CoeffExpr(Kind k, double v, int aux) : kind_(k), value_(v), aux_(aux) {}

    Kind kind_;
    double value_;
    int aux_; // variable index or integer exponent
    std::vector<std::shared_ptr<CoeffExpr>> kids_;
};

namespace detail {

class CoeffParser {
public:
    explicit CoeffParser(std::string_view text) : text_(text) {}

    CoeffExpr parse() {
        CoeffExpr e = expr();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError(pos_, "end of input or operator");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    CoeffExpr expr() {
        CoeffExpr e = term();
        for (;;) {
            if (eat('+')) e = CoeffExpr::binary(CoeffExpr::Kind::Add, std::move(e), term());
            else if (eat('-')) e = CoeffExpr::binary(CoeffExpr::Kind::Sub, std::move(e), term());
            else return e;
        }
    }

    CoeffExpr term() {
        CoeffExpr e = factor();
        for (;;) {
            if (eat('*')) e = CoeffExpr::binary(CoeffExpr::Kind::Mul, std::move(e), factor());
            else if (eat('/')) e = CoeffExpr::binary(CoeffExpr::Kind::Div, std::move(e), factor());
            else return e;
        }
    }

    CoeffExpr factor() {
        CoeffExpr e = base();
        if (eat('^')) {
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw SyntaxError(pos_, "unsigned integer exponent");
            unsigned exp = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                exp = exp * 10 + static_cast<unsigned>(text_[pos_++] - '0');
            return CoeffExpr::power(std::move(e), exp);
        }
        return e;
    }

    CoeffExpr base() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            CoeffExpr e = expr();
            if (!eat(')')) throw SyntaxError(pos_, "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == 'x') {
            ++pos_;
            int idx = 1; // "x" is accepted as an alias for "x1"
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                idx = text_[pos_++] - '0';
            if (idx < 1) throw SyntaxError(pos_ - 1, "variable index in 1..9");
            return CoeffExpr::var(idx);
        }
        if (match_kw("sin")) return func(CoeffExpr::Kind::Sin);
        if (match_kw("cos")) return func(CoeffExpr::Kind::Cos);
        if (match_kw("exp")) return func(CoeffExpr::Kind::Exp);
        throw SyntaxError(pos_, "number, 'x<digit>', '(', 'sin', 'cos', or 'exp'");
    }

    bool match_kw(std::string_view kw) {
        skip_ws();
        if (text_.substr(pos_, kw.size()) == kw) { pos_ += kw.size(); return true; }
        return false;
    }

    CoeffExpr func(CoeffExpr::Kind k) {
        if (!eat('(')) throw SyntaxError(pos_, "'('");
        CoeffExpr arg = expr();
        if (!eat(')')) throw SyntaxError(pos_, "')'");
        return CoeffExpr::unary(k, std::move(arg));
    }

    CoeffExpr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        // optional exponent part like 1e-3
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            else
                pos_ = save;
        }
        const std::string tok(text_.substr(start, pos_ - start));
        try {
            return CoeffExpr::number(std::stod(tok));
        } catch (const std::exception&) {
            throw SyntaxError(start, "number");
        }
    }
};

} // namespace detail

inline CoeffExpr parse_coeff(std::string_view text) { return detail::CoeffParser(text).parse(); }

} // namespace glt
