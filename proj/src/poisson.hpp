#pragma once

#include "opalg.hpp"

namespace qlax {

// One delta summand of a two-point bracket: coef * delta(w q^shift / z)
// times up to two field factors, each evaluated at z or at w. A factor with
// unit=true stands for the constant function 1 (the t_0 convention or a
// reduced t_N).
struct DeltaTerm {
    int shift = 0;
    QRat coef = QRat(1);
    struct Factor {
        Family fam = Family::T;
        int comp = 0;
        bool at_z = true;
        bool unit = false;
    };
    Factor u, v;  // u and v are both always present in the kernels we carry
};

// Declarative kernel for {g_i(z), g_j(w)}: a smooth rational kernel phi of
// x = q^m dressing g_i(z) g_j(w), plus finitely many delta terms.
struct KernelEntry {
    Family fam_i = Family::T;
    int ci = 0;
    Family fam_j = Family::T;
    int cj = 0;
    QRat phi;  // zero polynomial when there is no smooth part
    std::vector<DeltaTerm> deltas;
    bool derive_swap = false;  // stated for (i,j) only; (j,i) follows by antisymmetry
};

struct KernelTable {
    std::string name;
    std::vector<KernelEntry> rows;

    void scale(const QRat& w) {
        for (auto& r : rows) {
            r.phi = r.phi * w;
            for (auto& d : r.deltas) d.coef = d.coef * w;
        }
    }
    static KernelTable combined(const KernelTable& a, const QRat& wa, const KernelTable& b, const QRat& wb) {
        KernelTable t;
        t.name = a.name + "+" + b.name;
        KernelTable ca = a, cb = b;
        ca.scale(wa);
        cb.scale(wb);
        t.rows = ca.rows;
        t.rows.insert(t.rows.end(), cb.rows.begin(), cb.rows.end());
        return t;
    }
};

// The two KdV structures on the space of t_1..t_N (t_N frozen to 1 when
// reduced) and the Heisenberg-type structure on Lambda_1..Lambda_N.
KernelTable kdv_first_bracket(int N, bool reduced);
KernelTable kdv_second_bracket(int N, bool reduced);
KernelTable mkdv_bracket(int N);

namespace detail {

template <class K>
Poly<K> delta_factor_value(const DeltaTerm::Factor& f, int mode, int window) {
    if (f.unit) return mode == 0 ? Poly<K>::one() : Poly<K>::zero();
    if (std::abs(mode) > window) return Poly<K>::zero();
    return Poly<K>::gen(Gen{f.fam, f.comp, mode});
}

}  // namespace detail

// {g_i[a], g_j[b]} for one stored kernel row, on the live window.
template <class K>
Poly<K> mode_bracket_row(const KernelEntry& row, int a, int b, int window) {
    Poly<K> out;
    if (!row.phi.is_zero()) {
        // sum_m phi(q^m) g_i[a-m] g_j[b+m], both factors within the window
        int lo = std::max(a - window, -b - window);
        int hi = std::min(a + window, -b + window);
        for (int m = lo; m <= hi; ++m) {
            auto c = K::eval_x(row.phi, m);
            if (K::is_zero(c)) continue;
            Mono mono = Mono::gen(Gen{row.fam_i, row.ci, a - m}) * Mono::gen(Gen{row.fam_j, row.cj, b + m});
            out += Poly<K>::term(mono, c);
        }
    }
    for (const auto& d : row.deltas) {
        // delta(w q^r / z) = sum_mu q^{r mu} w^mu z^{-mu}; the z-factor sits
        // at mode a-mu and the w-factor at mode b+mu.
        const auto& zf = d.u.at_z ? d.u : d.v;
        const auto& wf = d.u.at_z ? d.v : d.u;
        if (d.u.at_z == d.v.at_z) throw arith_error("delta term: factors on the same argument");
        int lo, hi;
        if (zf.unit) {
            lo = hi = a;
        } else {
            lo = a - window;
            hi = a + window;
        }
        if (wf.unit) {
            lo = std::max(lo, -b);
            hi = std::min(hi, -b);
        } else {
            lo = std::max(lo, -b - window);
            hi = std::min(hi, -b + window);
        }
        for (int mu = lo; mu <= hi; ++mu) {
            Poly<K> fz = detail::delta_factor_value<K>(zf, a - mu, window);
            if (fz.is_zero()) continue;
            Poly<K> fw = detail::delta_factor_value<K>(wf, b + mu, window);
            if (fw.is_zero()) continue;
            auto c = K::from_qrat(d.coef) * K::qpow(static_cast<long>(d.shift) * mu);
            out += (fz * fw).scaled(c);
        }
    }
    return out;
}

// {g[a], g'[b]} assembled from every matching row (antisymmetric swap where
// the table stores only one orientation).
template <class K>
Poly<K> mode_bracket(const KernelTable& t, const Gen& ga, const Gen& gb, int window) {
    Poly<K> out;
    for (const auto& row : t.rows) {
        if (row.fam_i == ga.fam && row.ci == ga.comp && row.fam_j == gb.fam && row.cj == gb.comp)
            out += mode_bracket_row<K>(row, ga.mode, gb.mode, window);
        else if (row.derive_swap && row.fam_i == gb.fam && row.ci == gb.comp && row.fam_j == ga.fam &&
                 row.cj == ga.comp)
            out -= mode_bracket_row<K>(row, gb.mode, ga.mode, window);
    }
    return out;
}

// Functional built under the two-window discipline: `value` is exact for
// gradients w.r.t. modes up to built_window, which must dominate
// (degree-1)*W + grad_extra for a bracket evaluated on the window-W point.
template <class K>
struct Functional {
    Poly<K> value;
    int built_window = 0;
    int degree = 0;
    int grad_extra = 0;

    int needed_window(int W) const { return std::max(0, degree - 1) * W + grad_extra; }
};

template <class K>
void check_window(const Functional<K>& f, int W, const char* who) {
    if (f.built_window < f.needed_window(W))
        throw arith_error(std::string(who) + ": window too small for the degree bound (built " +
                          std::to_string(f.built_window) + ", need " + std::to_string(f.needed_window(W)) + ")");
}

// Leibniz extension {F,G} = sum dF/dg[p] dG/dg[p'] {g[p],g[p']}, restricted
// to the window-W point.
template <class K>
Poly<K> bracket(const Functional<K>& F, const Functional<K>& G, const KernelTable& t, int W) {
    check_window(F, W, "bracket lhs");
    check_window(G, W, "bracket rhs");
    std::vector<std::pair<Gen, Poly<K>>> gf, gg;
    for (const Gen& g : F.value.vars()) {
        Poly<K> d = F.value.gradient(g).restricted(W);
        if (!d.is_zero()) gf.push_back({g, d});
    }
    for (const Gen& g : G.value.vars()) {
        Poly<K> d = G.value.gradient(g).restricted(W);
        if (!d.is_zero()) gg.push_back({g, d});
    }
    Poly<K> out;
    for (auto& [g1, d1] : gf)
        for (auto& [g2, d2] : gg) {
            Poly<K> mb = mode_bracket<K>(t, g1, g2, W);
            if (mb.is_zero()) continue;
            out += d1 * d2 * mb;
        }
    return out;
}

// {g(z), H} as a z-series: the right-hand side of a hamiltonian flow.
template <class K>
Series<K> field_bracket(Family fam, int comp, const Functional<K>& H, const KernelTable& t, int W, int max_mode) {
    check_window(H, W, "field_bracket");
    std::vector<std::pair<Gen, Poly<K>>> gh;
    for (const Gen& g : H.value.vars()) {
        Poly<K> d = H.value.gradient(g).restricted(W);
        if (!d.is_zero()) gh.push_back({g, d});
    }
    Series<K> out;
    for (int m = -max_mode; m <= max_mode; ++m) {
        Poly<K> acc;
        for (auto& [g2, d2] : gh) {
            Poly<K> mb = mode_bracket<K>(t, Gen{fam, comp, m}, g2, W);
            if (mb.is_zero()) continue;
            acc += mb * d2;
        }
        if (!acc.is_zero()) out.c[m] = acc;
    }
    return out;
}

// {{F,G},H} + {{G,H},F} + {{H,F},G} on the window-W point, with the inner
// brackets evaluated on the inflated window W_mid.
template <class K>
Poly<K> jacobiator(const Functional<K>& F, const Functional<K>& G, const Functional<K>& H, const KernelTable& t,
                   int W, int W_mid) {
    auto inner = [&](const Functional<K>& A, const Functional<K>& B) {
        Functional<K> r;
        r.value = bracket(A, B, t, W_mid);
        r.built_window = W_mid;
        r.degree = A.degree + B.degree;
        return r;
    };
    Poly<K> out = bracket(inner(F, G), H, t, W);
    out += bracket(inner(G, H), F, t, W);
    out += bracket(inner(H, F), G, t, W);
    return out;
}

}  // namespace qlax
