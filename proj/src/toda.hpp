#pragma once

#include <memory>

#include "mkdv.hpp"

namespace qlax {

// Shared data of a Toda phase space: the Lambda fields, their capped
// geometric inverses, and the normalization conventions for the Q symbols.
template <class K>
struct TodaCtx {
    int N = 2;
    int window = 2;
    int degcap = 3;        // cap quoted by reports
    int internal_cap = 5;  // inverses are built a little deeper
    bool sine_gordon = false;  // N=2 with Lam_2 = Lam_1^{-1} and Q_2 = Q_1^{-1}
    std::vector<Series<K>> lam;      // 1..N
    std::vector<Series<K>> lam_inv;  // 1..N

    int wrap(int i) const { return ((i - 1) % N + N) % N + 1; }
};

template <class K>
std::shared_ptr<const TodaCtx<K>> make_toda_ctx(int N, int window, int degcap, bool sine_gordon = false,
                                                const GenAssign<K>* assign = nullptr) {
    auto ctx = std::make_shared<TodaCtx<K>>();
    ctx->N = N;
    ctx->window = window;
    ctx->degcap = degcap;
    ctx->internal_cap = degcap + 2;
    ctx->sine_gordon = sine_gordon;
    ctx->lam.resize(static_cast<size_t>(N) + 1);
    ctx->lam_inv.resize(static_cast<size_t>(N) + 1);
    for (int i = 1; i <= N; ++i)
        ctx->lam[static_cast<size_t>(i)] = generator_series<K>(Family::Lam, i, window, assign);
    if (sine_gordon) {
        if (N != 2) throw arith_error("sine-Gordon reduction is the N=2 case");
        ctx->lam[2] = ctx->lam[1].inverse(ctx->internal_cap);
    }
    for (int i = 1; i <= N; ++i)
        ctx->lam_inv[static_cast<size_t>(i)] = ctx->lam[static_cast<size_t>(i)].inverse(ctx->internal_cap);
    return ctx;
}

// Element of the Q-extension ring: a sum of Q-monomials (grades) with
// z-series coefficients in the localized Lambda ring. All Q symbols are kept
// at the base point; shifted symbols are rewritten through
// Q_i(zq) = Lam_i(z) Q_i(z), which is what q_shift implements.
template <class K>
struct QExt {
    using Grade = std::map<int, int>;  // Q component -> exponent, zero-free

    std::shared_ptr<const TodaCtx<K>> ctx;
    std::map<Grade, Series<K>> g;

    QExt() = default;
    static QExt one() {
        QExt e;
        e.g[Grade{}] = Series<K>::one();
        return e;
    }
    static QExt from_series(std::shared_ptr<const TodaCtx<K>> c, const Series<K>& s, Grade grade = {}) {
        QExt e;
        e.ctx = std::move(c);
        if (!s.is_zero()) e.g[e.normalized(grade)] = s;
        return e;
    }
    // monomial prod Q_i(z)^{e_i}
    static QExt q_monomial(std::shared_ptr<const TodaCtx<K>> c, const Grade& grade) {
        return from_series(std::move(c), Series<K>::one(), grade);
    }

    Grade normalized(Grade e) const {
        if (ctx && ctx->sine_gordon) {
            // Q_2 is identified with Q_1^{-1}
            auto it = e.find(2);
            if (it != e.end()) {
                e[1] -= it->second;
                e.erase(2);
            }
        }
        for (auto it = e.begin(); it != e.end();)
            it = (it->second == 0) ? e.erase(it) : std::next(it);
        return e;
    }

    bool is_zero() const { return g.empty(); }
    bool operator==(const QExt& o) const { return g == o.g; }

    int min_valid() const {
        int v = kNoCap;
        for (auto& [e, s] : g) v = std::min(v, s.valid_pert);
        return v;
    }

    QExt operator+(const QExt& o) const {
        QExt r = *this;
        if (!r.ctx) r.ctx = o.ctx;
        for (auto& [e, s] : o.g) {
            auto it = r.g.find(e);
            if (it == r.g.end())
                r.g[e] = s;
            else {
                it->second += s;
                if (it->second.is_zero()) r.g.erase(it);
            }
        }
        return r;
    }
    QExt operator-() const {
        QExt r = *this;
        for (auto& [e, s] : r.g) s = -s;
        return r;
    }
    QExt operator-(const QExt& o) const { return *this + (-o); }
    QExt& operator+=(const QExt& o) { *this = *this + o; return *this; }
    QExt& operator-=(const QExt& o) { *this = *this - o; return *this; }

    QExt operator*(const QExt& o) const {
        QExt r;
        r.ctx = ctx ? ctx : o.ctx;
        for (auto& [e1, s1] : g)
            for (auto& [e2, s2] : o.g) {
                Grade e = e1;
                for (auto& [i, k] : e2) {
                    e[i] += k;
                    if (e[i] == 0) e.erase(i);
                }
                e = r.normalized(std::move(e));
                Series<K> s = s1 * s2;
                if (s.is_zero()) continue;
                auto it = r.g.find(e);
                if (it == r.g.end())
                    r.g[e] = std::move(s);
                else {
                    it->second += s;
                    if (it->second.is_zero()) r.g.erase(it);
                }
            }
        return r;
    }

    QExt scaled(const typename K::Scalar& v) const {
        QExt r;
        r.ctx = ctx;
        for (auto& [e, s] : g) {
            Series<K> t = s.scaled(v);
            if (!t.is_zero()) r.g[e] = t;
        }
        return r;
    }

    QExt poly_scaled(const Poly<K>& p) const {
        QExt r;
        r.ctx = ctx;
        if (p.is_zero()) return r;
        Series<K> ps = Series<K>::constant(p);
        for (auto& [e, s] : g) {
            Series<K> t = s * ps;
            if (!t.is_zero()) r.g[e] = t;
        }
        return r;
    }

    // Lambda dressing picked up by moving Q^e from argument z q^j back to z.
    Series<K> dressing(const Grade& e, int j) const {
        Series<K> d = Series<K>::one();
        if (e.empty() || j == 0) return d;
        if (!ctx) throw arith_error("QExt: shifting a Q monomial requires a Toda context");
        if (j > 0) {
            for (int l = 0; l < j; ++l)
                for (auto& [i, k] : e) {
                    const Series<K>& base =
                        k > 0 ? ctx->lam[static_cast<size_t>(i)] : ctx->lam_inv[static_cast<size_t>(i)];
                    for (int r = 0; r < std::abs(k); ++r) d = d * base.q_shift(l);
                }
        } else {
            for (int l = 1; l <= -j; ++l)
                for (auto& [i, k] : e) {
                    const Series<K>& base =
                        k > 0 ? ctx->lam_inv[static_cast<size_t>(i)] : ctx->lam[static_cast<size_t>(i)];
                    for (int r = 0; r < std::abs(k); ++r) d = d * base.q_shift(-l);
                }
        }
        return d;
    }

    QExt q_shift(int j) const {
        if (j == 0) return *this;
        QExt r;
        r.ctx = ctx;
        for (auto& [e, s] : g) {
            Series<K> t = s.q_shift(j) * dressing(e, j);
            if (t.is_zero()) continue;
            auto it = r.g.find(e);
            if (it == r.g.end())
                r.g[e] = std::move(t);
            else
                it->second += t;
        }
        return r;
    }

    QExt pert_filtered(int cap) const {
        QExt r;
        r.ctx = ctx;
        for (auto& [e, s] : g) {
            Series<K> t = s.pert_filtered(cap);
            if (!t.is_zero()) r.g[e] = t;
        }
        return r;
    }

    std::string str() const {
        if (g.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [e, s] : g) {
            if (!first) os << " + ";
            os << "(" << s.str() << ")";
            for (auto& [i, k] : e) {
                os << "*Q" << i;
                if (k != 1) os << "^" << k;
            }
            first = false;
        }
        return os.str();
    }
};

template <class K>
QExt<K> unit_inverse(const QExt<K>& a, int degcap) {
    if (a.g.size() != 1) throw arith_error("QExt: inverse of a non-monomial element");
    const auto& [e, s] = *a.g.begin();
    typename QExt<K>::Grade inv_e;
    for (auto& [i, k] : e) inv_e[i] = -k;
    return QExt<K>::from_series(a.ctx, s.inverse(degcap), inv_e);
}

// ---------------------------------------------------------------------------
// The objects of the flow

// A_i(z) = Q_{i-1}(z) Q_i(z)^{-1}
template <class K>
QExt<K> toda_A(const std::shared_ptr<const TodaCtx<K>>& ctx, int i) {
    typename QExt<K>::Grade e;
    int im1 = ctx->wrap(i - 1), ii = ctx->wrap(i);
    e[im1] += 1;
    e[ii] -= 1;
    return QExt<K>::from_series(ctx, Series<K>::one(), e);
}

// S_i(z) = Q_i(z) Q_{i+1}(zq)^{-1} = Lam_{i+1}(z)^{-1} Q_i Q_{i+1}^{-1}
template <class K>
QExt<K> screening_density(const std::shared_ptr<const TodaCtx<K>>& ctx, int i) {
    typename QExt<K>::Grade e;
    int ii = ctx->wrap(i), ip1 = ctx->wrap(i + 1);
    e[ii] += 1;
    e[ip1] -= 1;
    return QExt<K>::from_series(ctx, ctx->lam_inv[static_cast<size_t>(ip1)], e);
}

// d/dt Lam_i = A_i(z) - A_{i+1}(zq)
template <class K>
QExt<K> toda_rhs(const std::shared_ptr<const TodaCtx<K>>& ctx, int i) {
    return toda_A(ctx, i) - toda_A(ctx, ctx->wrap(i + 1)).q_shift(1);
}

// ---------------------------------------------------------------------------
// Partial brackets {Lam, Q} and their Leibniz extension

// kernel of {Lam_j(z), Q_k(w)} as a rational function of x = q^m, with the
// argument shift of the delta-free sum folded in
QRat lam_q_kernel(int N, int j, int k);

// w-series of {Lam_j[p], Q_k(w)} / Q_k(w)
template <class K>
Series<K> lam_q_bracket_series(const std::shared_ptr<const TodaCtx<K>>& ctx, int j, int p, int k) {
    QRat psi = lam_q_kernel(ctx->N, j, k);
    Series<K> out;
    int W = ctx->window;
    for (int mu = -p - W; mu <= -p + W; ++mu) {
        auto c = K::eval_x(psi, -mu);
        if (K::is_zero(c)) continue;
        out.c[mu] = Poly<K>::term(Mono::gen(Gen{Family::Lam, j, p + mu}), c);
    }
    return out;
}

// {Lam_j[p], s(w)} for a series s in the Lambda ring, via the Leibniz rule
// over the Heisenberg-type kernels.
template <class K>
Series<K> lam_series_bracket(const std::shared_ptr<const TodaCtx<K>>& ctx, const KernelTable& pbg, int j, int p,
                             const Series<K>& s) {
    Series<K> out;
    out.valid_pert = s.valid_pert >= kNoCap ? kNoCap : s.valid_pert - 1;
    Gen gj{Family::Lam, j, p};
    for (auto& [nu, poly] : s.c) {
        Poly<K> acc;
        for (const Gen& g2 : poly.vars()) {
            Poly<K> d = poly.gradient(g2).restricted(ctx->window);
            if (d.is_zero()) continue;
            Poly<K> mb = mode_bracket<K>(pbg, gj, g2, ctx->window);
            if (mb.is_zero()) continue;
            acc += d * mb;
        }
        if (!acc.is_zero()) out.c[nu] = acc;
    }
    out.enforce_cap();
    return out;
}

// {Lam_j[p], E} for an extension-ring element E.
template <class K>
QExt<K> partial_bracket(const std::shared_ptr<const TodaCtx<K>>& ctx, const KernelTable& pbg, int j, int p,
                        const QExt<K>& E) {
    QExt<K> out;
    out.ctx = ctx;
    for (auto& [e, s] : E.g) {
        Series<K> total = lam_series_bracket(ctx, pbg, j, p, s);
        for (auto& [k, ek] : e) {
            if (ek == 0) continue;
            Series<K> kb = lam_q_bracket_series(ctx, j, p, k).scaled(K::from_long(ek));
            total += s * kb;
        }
        if (!total.is_zero()) out.g[e] = total;
    }
    return out;
}

// {Lam_j[p], int E}: the 0th w-Fourier coefficient, grade by grade.
template <class K>
QExt<K> partial_bracket_integrated(const std::shared_ptr<const TodaCtx<K>>& ctx, const KernelTable& pbg, int j,
                                   int p, const QExt<K>& E) {
    QExt<K> full = partial_bracket(ctx, pbg, j, p, E);
    QExt<K> out;
    out.ctx = ctx;
    for (auto& [e, s] : full.g) {
        Poly<K> v = s.mode(0);
        if (v.is_zero()) continue;
        Series<K> sv;
        sv.valid_pert = s.valid_pert;
        sv.c[0] = v;
        out.g[e] = sv;
    }
    return out;
}

// {F, int E} for a plain Lambda functional F.
template <class K>
QExt<K> screening_bracket(const std::shared_ptr<const TodaCtx<K>>& ctx, const KernelTable& pbg,
                          const Poly<K>& F, const QExt<K>& E) {
    QExt<K> out;
    out.ctx = ctx;
    for (const Gen& g : F.vars()) {
        if (g.fam != Family::Lam) continue;
        Poly<K> d = F.gradient(g).restricted(ctx->window);
        if (d.is_zero()) continue;
        out += partial_bracket_integrated(ctx, pbg, g.comp, g.mode, E).poly_scaled(d);
    }
    return out;
}

}  // namespace qlax
