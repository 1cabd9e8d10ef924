#pragma once

#include <functional>

#include "modering.hpp"

namespace qlax {

// Polynomial in the classical-limit generators with truncated h-series
// coefficients; the target of the q = e^h substitutions.
class LimitPoly {
public:
    std::map<Mono, HSeries> t;

    static LimitPoly zero() { return LimitPoly(); }
    static LimitPoly constant(const HSeries& c) {
        LimitPoly p;
        if (!c.known_zero()) p.t.emplace(Mono::unit(), c);
        return p;
    }
    static LimitPoly term(const Mono& m, const HSeries& c) {
        LimitPoly p;
        if (!c.known_zero()) p.t.emplace(m, c);
        return p;
    }

    bool known_zero() const { return t.empty(); }

    LimitPoly operator+(const LimitPoly& o) const {
        // zero coefficients are kept: they carry the recorded precision
        LimitPoly r = *this;
        for (auto& [m, c] : o.t) {
            auto it = r.t.find(m);
            if (it == r.t.end())
                it = r.t.emplace(m, c).first;
            else
                it->second = it->second + c;
        }
        return r;
    }
    LimitPoly operator-() const {
        LimitPoly r = *this;
        for (auto& [m, c] : r.t) c = -c;
        return r;
    }
    LimitPoly operator-(const LimitPoly& o) const { return *this + (-o); }

    LimitPoly operator*(const LimitPoly& o) const {
        LimitPoly r;
        for (auto& [m1, c1] : t)
            for (auto& [m2, c2] : o.t) {
                Mono m = m1 * m2;
                HSeries c = c1 * c2;
                auto it = r.t.find(m);
                if (it == r.t.end())
                    r.t.emplace(std::move(m), std::move(c));
                else
                    it->second = it->second + c;
            }
        return r;
    }

    LimitPoly scaled(const HSeries& s) const {
        LimitPoly r;
        for (auto& [m, c] : t) r.t.emplace(m, c * s);
        return r;
    }

    HSeries coeff(const Mono& m, int prec) const {
        auto it = t.find(m);
        return it == t.end() ? HSeries(prec) : it->second;
    }

    // lowest h-order at which any known nonzero term appears
    int val() const {
        int v = 1 << 20;
        for (auto& [m, c] : t) v = std::min(v, c.val());
        return v;
    }
    int min_prec() const {
        int p = 1 << 20;
        for (auto& [m, c] : t) p = std::min(p, c.prec());
        return p;
    }

    // true when every known coefficient vanishes below `order`
    bool vanishes_below(int order) const {
        for (auto& [m, c] : t)
            if (c.val() < std::min(order, c.prec())) return false;
        return true;
    }

    // the exact-rational coefficient poly at one h-order
    std::map<Mono, Rat> at_order(int e) const {
        std::map<Mono, Rat> out;
        for (auto& [m, c] : t) {
            Rat v = c.coeff(e);
            if (v != 0) out.emplace(m, v);
        }
        return out;
    }

    std::string str() const {
        if (t.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, c] : t) {
            if (!first) os << " + ";
            os << "(" << c.str() << ")";
            if (!m.is_one()) os << "*" << m.str();
            first = false;
        }
        return os.str();
    }
};

// z-series with LimitPoly coefficients.
class LimitSeries {
public:
    std::map<int, LimitPoly> c;

    static LimitSeries zero() { return LimitSeries(); }
    LimitPoly mode(int m) const {
        auto it = c.find(m);
        return it == c.end() ? LimitPoly() : it->second;
    }
    void set_mode(int m, const LimitPoly& p) {
        if (!p.t.empty()) c[m] = p;
    }

    LimitSeries operator+(const LimitSeries& o) const {
        LimitSeries r = *this;
        for (auto& [m, p] : o.c) {
            auto it = r.c.find(m);
            if (it == r.c.end())
                r.c[m] = p;
            else
                it->second = it->second + p;
        }
        return r;
    }
    LimitSeries operator-() const {
        LimitSeries r = *this;
        for (auto& [m, p] : r.c) p = -p;
        return r;
    }
    LimitSeries operator-(const LimitSeries& o) const { return *this + (-o); }
    LimitSeries operator*(const LimitSeries& o) const {
        LimitSeries r;
        for (auto& [m1, p1] : c)
            for (auto& [m2, p2] : o.c) {
                auto it = r.c.find(m1 + m2);
                if (it == r.c.end())
                    r.c[m1 + m2] = p1 * p2;
                else
                    it->second = it->second + p1 * p2;
            }
        return r;
    }
    LimitSeries scaled(const HSeries& s) const {
        LimitSeries r;
        for (auto& [m, p] : c) r.c[m] = p.scaled(s);
        return r;
    }
    // f(z q^j): mode m picks up e^{-jmh}
    LimitSeries q_shift(int j, int prec) const {
        LimitSeries r;
        for (auto& [m, p] : c) r.c[m] = p.scaled(exp_series(-static_cast<long>(j) * m, prec));
        return r;
    }
};

// Substitution of the q-fields by their classical expansions; maps every
// generator to a LimitPoly over the classical families.
using LimitRule = std::function<LimitPoly(const Gen&, int prec)>;

// t_i[m] -> 2 delta_{m,0} - h^2 u_i[m]
LimitPoly kdv_limit_rule(const Gen& g, int prec);
// lam_i[m] -> delta_{m,0} - h v_i[m]
LimitPoly mkdv_limit_rule(const Gen& g, int prec);

// Expand an exact-coefficient polynomial under a substitution rule.
LimitPoly substitute_limit(const Poly<ExactField>& p, const LimitRule& rule, int prec);

}  // namespace qlax
