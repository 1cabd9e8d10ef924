#include "limits.hpp"

namespace qlax {

LimitPoly kdv_limit_rule(const Gen& g, int prec) {
    LimitPoly out;
    if (g.mode == 0) out = out + LimitPoly::constant(HSeries::from_rat(Rat(2), prec));
    HSeries mh2(2, prec, {Rat(-1)});
    out = out + LimitPoly::term(Mono::gen(Gen{Family::U, g.comp, g.mode}), mh2);
    return out;
}

LimitPoly mkdv_limit_rule(const Gen& g, int prec) {
    LimitPoly out;
    if (g.mode == 0) out = out + LimitPoly::constant(HSeries::from_rat(Rat(1), prec));
    HSeries mh(1, prec, {Rat(-1)});
    out = out + LimitPoly::term(Mono::gen(Gen{Family::V, g.comp, g.mode}), mh);
    return out;
}

LimitPoly substitute_limit(const Poly<ExactField>& p, const LimitRule& rule, int prec) {
    LimitPoly out;
    for (auto& [m, c] : p.terms()) {
        LimitPoly acc = LimitPoly::constant(h_expand(c, prec));
        for (auto& [g, e] : m.f) {
            if (e < 0) throw arith_error("substitute_limit: negative exponent");
            LimitPoly base = rule(g, prec);
            for (int k = 0; k < e; ++k) acc = acc * base;
        }
        out = out + acc;
    }
    return out;
}

}  // namespace qlax
