#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "scalars.hpp"

namespace qlax {

// Formal Fourier-mode generators. T carries the KdV fields, Lam the mKdV
// fields, U/V/A the classical-limit fields, P the free KP coefficients.
enum class Family : uint8_t { T = 0, Lam, U, V, A, P };

const char* family_prefix(Family f);

struct Gen {
    Family fam;
    int comp;
    int mode;

    auto operator<=>(const Gen&) const = default;
    std::string str() const {
        std::ostringstream os;
        os << family_prefix(fam) << comp << "[" << mode << "]";
        return os.str();
    }
};

inline Gen t_gen(int comp, int mode) { return Gen{Family::T, comp, mode}; }
inline Gen lam_gen(int comp, int mode) { return Gen{Family::Lam, comp, mode}; }

// Monomial: sorted factor list with nonzero integer exponents. Negative
// exponents are reserved for localized units (mode-0 generators).
struct Mono {
    std::vector<std::pair<Gen, int>> f;

    auto operator<=>(const Mono&) const = default;
    bool is_one() const { return f.empty(); }
    int degree() const {
        int d = 0;
        for (auto& [g, e] : f) d += std::abs(e);
        return d;
    }
    // number of non-unit factors (generators at a nonzero mode)
    int pert_degree() const {
        int d = 0;
        for (auto& [g, e] : f)
            if (g.mode != 0) d += std::abs(e);
        return d;
    }
    int max_abs_mode() const {
        int m = 0;
        for (auto& [g, e] : f) m = std::max(m, std::abs(g.mode));
        return m;
    }
    bool within(int window) const { return max_abs_mode() <= window; }

    static Mono unit() { return Mono{}; }
    static Mono gen(const Gen& g, int e = 1) { return Mono{{{g, e}}}; }

    Mono operator*(const Mono& o) const;
    Mono inverse() const;  // negate exponents (unit monomials only)

    std::string str() const;
};

// Sparse polynomial over the coefficient field K in the mode generators,
// kept sorted with merged duplicates; equality is structural.
template <class K>
class Poly {
public:
    using S = typename K::Scalar;
    using Term = std::pair<Mono, S>;

    Poly() = default;
    static Poly zero() { return Poly(); }
    static Poly constant(const S& c) {
        Poly p;
        if (!K::is_zero(c)) p.t_.push_back({Mono::unit(), c});
        return p;
    }
    static Poly one() { return constant(K::one()); }
    static Poly gen(const Gen& g) { return term(Mono::gen(g), K::one()); }
    static Poly term(const Mono& m, const S& c) {
        Poly p;
        if (!K::is_zero(c)) p.t_.push_back({m, c});
        return p;
    }

    bool is_zero() const { return t_.empty(); }
    size_t size() const { return t_.size(); }
    const std::vector<Term>& terms() const { return t_; }
    bool operator==(const Poly& o) const { return t_ == o.t_; }

    Poly operator+(const Poly& o) const { return merged(o, false); }
    Poly operator-(const Poly& o) const { return merged(o, true); }
    Poly operator-() const {
        Poly r = *this;
        for (auto& [m, c] : r.t_) c = K::zero() - c;
        return r;
    }
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }

    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return Poly();
        std::map<Mono, S> acc;
        for (auto& [m1, c1] : t_)
            for (auto& [m2, c2] : o.t_) {
                S c = c1 * c2;
                if (K::is_zero(c)) continue;
                Mono m = m1 * m2;
                auto it = acc.find(m);
                if (it == acc.end())
                    acc.emplace(std::move(m), std::move(c));
                else {
                    it->second = it->second + c;
                    if (K::is_zero(it->second)) acc.erase(it);
                }
            }
        return from_map(acc);
    }

    Poly scaled(const S& c) const {
        if (K::is_zero(c)) return Poly();
        Poly r = *this;
        for (auto& [m, v] : r.t_) v = v * c;
        return r;
    }

    // formal partial derivative
    Poly gradient(const Gen& g) const {
        std::map<Mono, S> acc;
        for (auto& [m, c] : t_) {
            for (size_t i = 0; i < m.f.size(); ++i) {
                if (m.f[i].first != g) continue;
                Mono d = m;
                int e = d.f[i].second;
                if (e == 1)
                    d.f.erase(d.f.begin() + static_cast<long>(i));
                else
                    d.f[i].second = e - 1;
                S cc = c * K::from_long(e);
                auto it = acc.find(d);
                if (it == acc.end())
                    acc.emplace(std::move(d), std::move(cc));
                else
                    it->second = it->second + cc;
                break;
            }
        }
        for (auto it = acc.begin(); it != acc.end();)
            it = K::is_zero(it->second) ? acc.erase(it) : std::next(it);
        return from_map(acc);
    }

    std::set<Gen> vars() const {
        std::set<Gen> v;
        for (auto& [m, c] : t_)
            for (auto& [g, e] : m.f) v.insert(g);
        return v;
    }

    // drop every monomial touching a generator beyond the window
    Poly restricted(int window) const {
        Poly r;
        for (auto& [m, c] : t_)
            if (m.within(window)) r.t_.push_back({m, c});
        return r;
    }

    Poly pert_filtered(int cap) const {
        Poly r;
        for (auto& [m, c] : t_)
            if (m.pert_degree() <= cap) r.t_.push_back({m, c});
        return r;
    }

    int degree() const {
        int d = 0;
        for (auto& [m, c] : t_) d = std::max(d, m.degree());
        return d;
    }

    // substitute generators by polynomials; gens not mapped stay themselves
    Poly subst(const std::function<const Poly*(const Gen&)>& image) const {
        Poly out;
        for (auto& [m, c] : t_) {
            Poly acc = Poly::constant(c);
            for (auto& [g, e] : m.f) {
                const Poly* img = image(g);
                Poly base = img ? *img : Poly::gen(g);
                if (e < 0) throw arith_error("subst: negative exponent on substituted generator " + g.str());
                for (int k = 0; k < e; ++k) acc = acc * base;
                if (acc.is_zero()) break;
            }
            out += acc;
        }
        return out;
    }

    std::string str() const {
        if (t_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, c] : t_) {
            std::string cs = K::str(c);
            bool neg = !cs.empty() && cs[0] == '-';
            if (first) {
                if (neg) { os << "-"; cs = cs.substr(1); }
            } else {
                os << (neg ? " - " : " + ");
                if (neg) cs = cs.substr(1);
            }
            bool unit_coeff = (cs == "1");
            if (m.is_one()) {
                os << (cs.find_first_of("+-/ ") != std::string::npos ? "(" + cs + ")" : cs);
            } else {
                if (!unit_coeff)
                    os << (cs.find_first_of("+-/ ") != std::string::npos ? "(" + cs + ")" : cs) << "*";
                os << m.str();
            }
            first = false;
        }
        return os.str();
    }

private:
    std::vector<Term> t_;  // sorted by Mono

    Poly merged(const Poly& o, bool neg) const {
        Poly r;
        r.t_.reserve(t_.size() + o.t_.size());
        size_t i = 0, j = 0;
        while (i < t_.size() || j < o.t_.size()) {
            if (j == o.t_.size() || (i < t_.size() && t_[i].first < o.t_[j].first)) {
                r.t_.push_back(t_[i++]);
            } else if (i == t_.size() || o.t_[j].first < t_[i].first) {
                r.t_.push_back(o.t_[j]);
                if (neg) r.t_.back().second = K::zero() - r.t_.back().second;
                ++j;
            } else {
                S c = neg ? S(t_[i].second - o.t_[j].second) : S(t_[i].second + o.t_[j].second);
                if (!K::is_zero(c)) r.t_.push_back({t_[i].first, c});
                ++i;
                ++j;
            }
        }
        return r;
    }

    static Poly from_map(const std::map<Mono, S>& acc) {
        Poly r;
        r.t_.reserve(acc.size());
        for (auto& [m, c] : acc) r.t_.push_back({m, c});
        return r;
    }
};

constexpr int kNoCap = std::numeric_limits<int>::max();

// z-series sum_m c[m] z^{-m} with Poly coefficients. valid_pert records the
// perturbation degree up to which coefficients are exact (kNoCap = exact);
// it only drops below kNoCap once a capped geometric inverse enters.
template <class K>
class Series {
public:
    using P = Poly<K>;
    using S = typename K::Scalar;

    std::map<int, P> c;
    int valid_pert = kNoCap;

    Series() = default;
    static Series zero() { return Series(); }
    static Series constant(const P& p) {
        Series s;
        if (!p.is_zero()) s.c[0] = p;
        return s;
    }
    static Series one() { return constant(P::one()); }
    static Series scalar(const S& v) { return constant(P::constant(v)); }
    // the full generator series over the live window
    static Series generator(Family fam, int comp, int window) {
        Series s;
        for (int m = -window; m <= window; ++m) s.c[m] = P::gen(Gen{fam, comp, m});
        return s;
    }

    bool is_zero() const { return c.empty(); }
    P mode(int m) const {
        auto it = c.find(m);
        return it == c.end() ? P::zero() : it->second;
    }
    void set_mode(int m, const P& p) {
        if (p.is_zero())
            c.erase(m);
        else
            c[m] = p;
    }
    bool operator==(const Series& o) const { return c == o.c; }

    Series operator+(const Series& o) const {
        Series r = *this;
        r.valid_pert = std::min(valid_pert, o.valid_pert);
        for (auto& [m, p] : o.c) {
            auto it = r.c.find(m);
            if (it == r.c.end())
                r.c[m] = p;
            else {
                it->second += p;
                if (it->second.is_zero()) r.c.erase(it);
            }
        }
        r.enforce_cap();
        return r;
    }
    Series operator-(const Series& o) const { return *this + (-o); }
    Series operator-() const {
        Series r = *this;
        for (auto& [m, p] : r.c) p = -p;
        return r;
    }
    Series& operator+=(const Series& o) { *this = *this + o; return *this; }
    Series& operator-=(const Series& o) { *this = *this - o; return *this; }

    Series operator*(const Series& o) const {
        Series r;
        r.valid_pert = std::min(valid_pert, o.valid_pert);
        for (auto& [m1, p1] : c)
            for (auto& [m2, p2] : o.c) {
                P p = p1 * p2;
                if (p.is_zero()) continue;
                auto it = r.c.find(m1 + m2);
                if (it == r.c.end())
                    r.c[m1 + m2] = std::move(p);
                else {
                    it->second += p;
                    if (it->second.is_zero()) r.c.erase(it);
                }
            }
        r.enforce_cap();
        return r;
    }

    // keep the invariant: stored monomials lie within the validity cap
    void enforce_cap() {
        if (valid_pert >= kNoCap) return;
        for (auto it = c.begin(); it != c.end();) {
            it->second = it->second.pert_filtered(valid_pert);
            it = it->second.is_zero() ? c.erase(it) : std::next(it);
        }
    }

    Series scaled(const S& v) const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            P q = p.scaled(v);
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    // f(z q^j): coefficient at mode m picks up q^{-jm}
    Series q_shift(int j) const {
        if (j == 0) return *this;
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            P q = p.scaled(K::qpow(-static_cast<long>(j) * m));
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    // (1 + D + ... + D^{n-1}) f
    Series apply_cyclic(int n) const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            S d = cyclic_divisor(n, m);
            P q = p.scaled(d);
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    // (1 - D) f
    Series apply_one_minus_shift() const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            S d = K::one() - K::qpow(-m);
            P q = p.scaled(d);
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    // solve (1 + D + ... + D^{n-1}) f = *this
    Series cyclic_invert(int n) const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) r.c[m] = p.scaled(K::cyclic_div_inv(n, m));
        return r;
    }

    // solve (1 - D) g = *this; requires a vanishing 0th coefficient
    Series total_difference_witness() const {
        if (!mode(0).is_zero())
            throw arith_error("total_difference_witness: nonzero 0th Fourier coefficient");
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            if (m == 0) continue;
            r.c[m] = p.scaled(K::one_minus_shift_inv(m));
        }
        return r;
    }

    // Truncated geometric inverse of f = c(1+r) with c a unit monomial; the
    // result is exact on perturbation degrees <= degcap.
    Series inverse(int degcap) const;

    Series restricted(int window) const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            P q = p.restricted(window);
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    Series pert_filtered(int cap) const {
        Series r;
        r.valid_pert = valid_pert;
        for (auto& [m, p] : c) {
            P q = p.pert_filtered(cap);
            if (!q.is_zero()) r.c[m] = q;
        }
        return r;
    }

    int min_mode() const { return c.empty() ? 0 : c.begin()->first; }
    int max_mode() const { return c.empty() ? 0 : c.rbegin()->first; }

    std::string str() const {
        if (c.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [m, p] : c) {
            if (!first) os << " + ";
            os << "sum(" << m << ", " << p.str() << ", z^" << -m << ")";
            first = false;
        }
        return os.str();
    }

    static S cyclic_divisor(int n, int m) {
        S d = K::zero();
        for (int j = 0; j < n; ++j) d = d + K::qpow(-static_cast<long>(j) * m);
        return d;
    }
};

template <class K>
Series<K> Series<K>::inverse(int degcap) const {
    // split off the unit part of the 0-mode coefficient
    P p0 = mode(0);
    P unit = p0.pert_filtered(0);
    if (unit.size() != 1)
        throw arith_error("series inverse: constant mode is not a unit monomial");
    const auto& [um, uc] = unit.terms()[0];
    for (auto& [g, e] : um.f)
        if (g.mode != 0) throw arith_error("series inverse: unit monomial has a nonzero mode factor");
    S ic = K::one() / uc;
    Series cinv = Series::constant(P::term(um.inverse(), ic));
    Series r = (*this) * cinv - Series::one();  // pert degree >= 1
    if (r.is_zero()) {
        cinv.valid_pert = valid_pert;
        return cinv;
    }
    Series acc = Series::one();
    Series pw = Series::one();
    for (int d = 1; d <= degcap; ++d) {
        pw = (pw * r).pert_filtered(degcap);
        if (d % 2 == 1)
            acc -= pw;
        else
            acc += pw;
        if (pw.is_zero()) break;
    }
    Series out = (acc * cinv).pert_filtered(degcap);
    out.valid_pert = std::min(valid_pert, degcap);
    return out;
}

// Derivation given by its images on generators; extends by the Leibniz rule.
template <class K>
struct Deriv {
    std::map<Gen, Poly<K>> img;

    Poly<K> apply(const Poly<K>& f) const {
        Poly<K> out;
        for (auto& [m, c] : f.terms()) {
            for (size_t i = 0; i < m.f.size(); ++i) {
                auto it = img.find(m.f[i].first);
                if (it == img.end()) continue;
                Mono d = m;
                int e = d.f[i].second;
                if (e == 1)
                    d.f.erase(d.f.begin() + static_cast<long>(i));
                else
                    d.f[i].second = e - 1;
                out += (Poly<K>::term(d, c * K::from_long(e))) * it->second;
            }
        }
        return out;
    }

    Series<K> apply(const Series<K>& s) const {
        Series<K> out;
        // differentiating a capped series costs one perturbation order
        out.valid_pert = s.valid_pert >= kNoCap ? kNoCap : s.valid_pert - 1;
        for (auto& [m, p] : s.c) {
            Poly<K> q = apply(p);
            if (!q.is_zero()) out.c[m] = q;
        }
        out.enforce_cap();
        return out;
    }
};

}  // namespace qlax
