#include "textio.hpp"

#include <cctype>

namespace qlax {

namespace {

using PV = ParsedValue;
using EF = ExactField;

struct Lexer {
    std::string s;
    size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw parse_error(std::string("expected '") + c + "' at offset " + std::to_string(i));
    }
    bool at_ident() {
        skip();
        return i < s.size() && std::islower(static_cast<unsigned char>(s[i]));
    }
    std::string ident() {
        skip();
        size_t j = i;
        while (j < s.size() && std::islower(static_cast<unsigned char>(s[j]))) ++j;
        std::string w = s.substr(i, j - i);
        i = j;
        return w;
    }
    long integer() {
        skip();
        size_t j = i;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        size_t k = j;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == j) throw parse_error("expected an integer at offset " + std::to_string(i));
        long v = std::stol(s.substr(i, k - i));
        i = k;
        return v;
    }
    bool at_digit() {
        skip();
        return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
    }
};

Family family_of(const std::string& w) {
    if (w == "t") return Family::T;
    if (w == "lam") return Family::Lam;
    if (w == "u") return Family::U;
    if (w == "v") return Family::V;
    if (w == "a") return Family::A;
    if (w == "p") return Family::P;
    throw parse_error("unknown generator family '" + w + "'");
}

struct Parser {
    Lexer lx;
    int window;

    PV expr();

    PV promote(PV v, PV::Kind k) {
        while (v.kind < k) {
            switch (v.kind) {
                case PV::kScalar:
                    v.poly = Poly<EF>::constant(v.scalar);
                    v.kind = PV::kPoly;
                    break;
                case PV::kPoly:
                    v.series = Series<EF>::constant(v.poly);
                    v.kind = PV::kSeries;
                    break;
                case PV::kSeries:
                    v.op = PdOp<Series<EF>>::from_coeff(v.series);
                    v.kind = PV::kOp;
                    break;
                default:
                    break;
            }
        }
        return v;
    }

    PV combine(PV a, PV b, char op) {
        PV::Kind k = std::max(a.kind, b.kind);
        if (op == '/') {
            if (k != PV::kScalar) throw parse_error("division is only defined for scalars");
            PV r;
            r.scalar = a.scalar / b.scalar;
            return r;
        }
        a = promote(std::move(a), k);
        b = promote(std::move(b), k);
        PV r;
        r.kind = k;
        switch (k) {
            case PV::kScalar:
                r.scalar = (op == '+') ? a.scalar + b.scalar : (op == '-') ? a.scalar - b.scalar : a.scalar * b.scalar;
                break;
            case PV::kPoly:
                r.poly = (op == '+') ? a.poly + b.poly : (op == '-') ? a.poly - b.poly : a.poly * b.poly;
                break;
            case PV::kSeries:
                r.series =
                    (op == '+') ? a.series + b.series : (op == '-') ? a.series - b.series : a.series * b.series;
                break;
            case PV::kOp:
                r.op = (op == '+') ? a.op + b.op : (op == '-') ? a.op - b.op : a.op * b.op;
                break;
        }
        return r;
    }

    PV power(PV a, long e) {
        if (a.kind == PV::kScalar) {
            PV r;
            r.scalar = QRat(1);
            QRat base = e < 0 ? a.scalar.inv() : a.scalar;
            for (long k = 0; k < std::labs(e); ++k) r.scalar = r.scalar * base;
            return r;
        }
        if (e < 0) throw parse_error("negative powers are only defined for scalars and D");
        PV r;
        r.kind = a.kind;
        switch (a.kind) {
            case PV::kPoly: {
                r.poly = Poly<EF>::one();
                for (long k = 0; k < e; ++k) r.poly = r.poly * a.poly;
                break;
            }
            case PV::kSeries: {
                r.series = Series<EF>::one();
                for (long k = 0; k < e; ++k) r.series = r.series * a.series;
                break;
            }
            case PV::kOp: {
                r.op = a.op.pow(static_cast<int>(e));
                break;
            }
            default:
                break;
        }
        return r;
    }

    PV atom() {
        if (lx.eat('(')) {
            PV v = expr();
            lx.expect(')');
            return v;
        }
        if (lx.eat('-')) {
            PV v = factor();
            PV zero;
            zero.scalar = QRat(0);
            return combine(zero, std::move(v), '-');
        }
        if (lx.at_digit()) {
            long num = lx.integer();
            PV v;
            v.scalar = QRat(Rat(num));
            return v;
        }
        if (lx.peek() == 'D') {
            ++lx.i;
            long e = 1;
            if (lx.eat('^')) e = lx.integer();
            PV v;
            v.kind = PV::kOp;
            v.op = PdOp<Series<EF>>::d_power(static_cast<int>(e));
            return v;
        }
        std::string w = lx.ident();
        if (w.empty()) throw parse_error("unexpected character at offset " + std::to_string(lx.i));
        if (w == "q") {
            long e = 1;
            if (lx.eat('^')) e = lx.integer();
            PV v;
            v.scalar = QRat::q_power(e);
            return v;
        }
        if (w == "sum") {
            lx.expect('(');
            long m = lx.integer();
            lx.expect(',');
            PV coeff = expr();
            lx.expect(',');
            std::string z = lx.ident();
            if (z != "z") throw parse_error("expected z^ in sum(...)");
            lx.expect('^');
            long zm = lx.integer();
            if (zm != -m) throw parse_error("sum(m, c, z^k) requires k = -m");
            lx.expect(')');
            coeff = promote(std::move(coeff), PV::kPoly);
            PV v;
            v.kind = PV::kSeries;
            v.series.set_mode(static_cast<int>(m), coeff.poly);
            return v;
        }
        // generator family
        Family fam = family_of(w);
        long comp = lx.integer();
        if (lx.eat('[')) {
            long mode = lx.integer();
            lx.expect(']');
            PV v;
            v.kind = PV::kPoly;
            v.poly = Poly<EF>::gen(Gen{fam, static_cast<int>(comp), static_cast<int>(mode)});
            return v;
        }
        lx.expect('(');
        std::string zz = lx.ident();
        if (zz != "z" && zz != "zq") throw parse_error("expected z or zq in series argument");
        long shift = 0;
        if (zz == "zq") {
            shift = 1;
            if (lx.eat('^')) shift = lx.integer();
        }
        lx.expect(')');
        PV v;
        v.kind = PV::kSeries;
        v.series = Series<EF>::generator(fam, static_cast<int>(comp), window).q_shift(static_cast<int>(shift));
        return v;
    }

    PV factor() {
        PV a = atom();
        while (lx.peek() == '^') {
            lx.eat('^');
            long e = lx.integer();
            a = power(std::move(a), e);
        }
        return a;
    }

    bool at_factor_start() {
        char c = lx.peek();
        return c == '(' || std::isdigit(static_cast<unsigned char>(c)) ||
               std::islower(static_cast<unsigned char>(c)) || c == 'D';
    }

    PV term() {
        PV a = factor();
        for (;;) {
            if (lx.eat('*')) {
                a = combine(std::move(a), factor(), '*');
            } else if (lx.eat('/')) {
                a = combine(std::move(a), factor(), '/');
            } else if (at_factor_start()) {
                a = combine(std::move(a), factor(), '*');  // juxtaposition
            } else {
                break;
            }
        }
        return a;
    }
};

PV Parser::expr() {
    PV a = term();
    for (;;) {
        if (lx.eat('+'))
            a = combine(std::move(a), term(), '+');
        else if (lx.eat('-'))
            a = combine(std::move(a), term(), '-');
        else
            break;
    }
    return a;
}

}  // namespace

ParsedValue parse_expression(const std::string& text, int window) {
    Parser p{Lexer{text, 0}, window};
    ParsedValue v = p.expr();
    if (!p.lx.eof()) throw parse_error("trailing input at offset " + std::to_string(p.lx.i));
    return v;
}

PdOp<Series<ExactField>> parse_operator(const std::string& text, int window) {
    Parser p{Lexer{text, 0}, window};
    ParsedValue v = p.promote(p.expr(), ParsedValue::kOp);
    if (!p.lx.eof()) throw parse_error("trailing input at offset " + std::to_string(p.lx.i));
    return v.op;
}

Series<ExactField> parse_series(const std::string& text, int window) {
    Parser p{Lexer{text, 0}, window};
    ParsedValue v = p.promote(p.expr(), ParsedValue::kSeries);
    if (!p.lx.eof()) throw parse_error("trailing input at offset " + std::to_string(p.lx.i));
    if (v.kind == ParsedValue::kOp) throw parse_error("expected a series, got an operator");
    return v.series;
}

Gen parse_generator(const std::string& text) {
    ParsedValue v = parse_expression(text, 0);
    if (v.kind != ParsedValue::kPoly || v.poly.size() != 1) throw parse_error("expected a single generator");
    const auto& [m, c] = v.poly.terms()[0];
    if (m.f.size() != 1 || m.f[0].second != 1 || !c.is_one()) throw parse_error("expected a single generator");
    return m.f[0].first;
}

std::string op_str(const PdOp<Series<ExactField>>& op) { return op.str(); }

}  // namespace qlax
