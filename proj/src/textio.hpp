#pragma once

#include "opalg.hpp"

namespace qlax {

struct parse_error : arith_error {
    explicit parse_error(const std::string& what) : arith_error("parse error: " + what) {}
};

// Parsed value: scalars, mode polynomials, z-series and operators share one
// expression grammar; the kind records how far an expression was promoted.
struct ParsedValue {
    enum Kind { kScalar, kPoly, kSeries, kOp } kind = kScalar;
    QRat scalar = QRat(0);
    Poly<ExactField> poly;
    Series<ExactField> series;
    PdOp<Series<ExactField>> op;
};

// Grammar (also documented in the README):
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)* with juxtaposition meaning '*'
//   factor   := atom ('^' int)?
//   atom     := rational | 'q' | 'D' | gen | genseries | sumterm | '(' expr ')' | '-' atom
//   gen      := fam comp '[' int ']'          (t1[-3], lam2[0], p0[1], ...)
//   genseries:= fam comp '(' 'z' ('q' ('^' int)?)? ')'   (t1(z), lam2(zq^-1))
//   sumterm  := 'sum' '(' int ',' expr ',' 'z' '^' int ')'
// Generator series expand over the window supplied to the parser.
ParsedValue parse_expression(const std::string& text, int window);

PdOp<Series<ExactField>> parse_operator(const std::string& text, int window);
Series<ExactField> parse_series(const std::string& text, int window);
Gen parse_generator(const std::string& text);

std::string op_str(const PdOp<Series<ExactField>>& op);

}  // namespace qlax
