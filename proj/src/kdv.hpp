#pragma once

#include <functional>
#include <optional>

#include "poisson.hpp"

namespace qlax {

template <class K>
bool capped_equal(const Series<K>& a, const Series<K>& b, int* cap_out = nullptr) {
    int cap = std::min(a.valid_pert, b.valid_pert);
    if (cap_out) *cap_out = cap;
    if (cap >= kNoCap) return a == b;
    return a.pert_filtered(cap) == b.pert_filtered(cap);
}

// Optional specialization of generator values (random phase-space points).
template <class K>
using GenAssign = std::function<typename K::Scalar(const Gen&)>;

template <class K>
Series<K> generator_series(Family fam, int comp, int window, const GenAssign<K>* assign) {
    if (!assign) return Series<K>::generator(fam, comp, window);
    Series<K> s;
    for (int m = -window; m <= window; ++m) {
        auto v = (*assign)(Gen{fam, comp, m});
        if (!K::is_zero(v)) s.c[m] = Poly<K>::constant(v);
    }
    return s;
}

template <class K>
struct KdVState {
    int N = 2;
    int window = 2;
    bool reduced = true;
    PdOp<Series<K>> L;
    std::vector<int> comps;  // live t components

    static KdVState make(int N, int window, bool reduced, const GenAssign<K>* assign = nullptr) {
        KdVState s;
        s.N = N;
        s.window = window;
        s.reduced = reduced;
        s.L = PdOp<Series<K>>::d_power(N);
        int live = reduced ? N - 1 : N;
        for (int i = 1; i <= live; ++i) {
            s.comps.push_back(i);
            Series<K> ti = generator_series<K>(Family::T, i, window, assign);
            int sign = (i % 2 == 0) ? 1 : -1;
            s.L += PdOp<Series<K>>::from_coeff(ti.scaled(K::from_long(sign)), N - i);
        }
        if (reduced) {
            int sign = (N % 2 == 0) ? 1 : -1;
            s.L += PdOp<Series<K>>::from_coeff(Series<K>::scalar(K::from_long(sign)), 0);
        }
        return s;
    }
};

// Smallest depth that keeps (L^{n/N})_+ and Res L^{n/N} exact, with margin.
inline int default_root_depth(int n, int N) {
    (void)N;
    return n;
}

template <class K>
struct FlowResult {
    Deriv<K> deriv;
    std::map<int, Series<K>> rhs;  // component -> flow series
};

// The n-th Lax flow [L, (L^{n/N})_+], returned as a derivation on the t
// generators. Cross-checks the minus-commutator form and the order bound.
template <class K>
FlowResult<K> qkdv_flow(const KdVState<K>& S, int n, int K_depth = -1) {
    if (n < 1) throw arith_error("qkdv_flow: n must be >= 1");
    if (K_depth < 0) K_depth = default_root_depth(n, S.N);
    PdOp<Series<K>> P = nth_root(S.L, S.N, K_depth);
    PdOp<Series<K>> Pn = root_power(S.L, P, n, S.N);
    if (Pn.depth < 0) throw arith_error("qkdv_flow: truncation depth insufficient");
    PdOp<Series<K>> A = Pn.plus_part();
    A.depth = kInfDepth;  // a finite operator in its own right
    PdOp<Series<K>> F = commutator(S.L, A);
    if (F.top() > S.N - 1 || F.bottom() < 0)
        throw arith_error("qkdv_flow: commutator not supported on D^0..D^{N-1}");
    PdOp<Series<K>> B = Pn.minus_part();
    PdOp<Series<K>> G = -commutator(S.L, B);
    if (G.depth >= 0 && !F.eq_to_depth(G, G.depth))
        throw arith_error("qkdv_flow: plus/minus commutator forms disagree");
    if (n % S.N == 0 && !F.is_zero())
        throw arith_error("qkdv_flow: flow at n divisible by N is not zero");
    if (S.reduced && !F.coeff(0).is_zero())
        throw arith_error("qkdv_flow: flow does not preserve the reduced manifold");
    FlowResult<K> out;
    for (int i : S.comps) {
        int sign = (i % 2 == 0) ? 1 : -1;
        Series<K> rhs = F.coeff(S.N - i).scaled(K::from_long(sign));
        for (auto& [m, p] : rhs.c) out.deriv.img[Gen{Family::T, i, m}] = p;
        out.rhs[i] = rhs;
    }
    if (!S.reduced) {
        // t_N is always a fixed point of the hierarchy
        Series<K> rhsN = F.coeff(0).scaled(K::from_long((S.N % 2 == 0) ? 1 : -1));
        if (!rhsN.is_zero()) throw arith_error("qkdv_flow: t_N is not conserved");
    }
    return out;
}

// Density Res L^{n/N} over the state's window.
template <class K>
Series<K> res_density(const KdVState<K>& S, int n, int K_depth = -1) {
    if (K_depth < 0) K_depth = default_root_depth(n, S.N);
    PdOp<Series<K>> P = nth_root(S.L, S.N, K_depth);
    PdOp<Series<K>> Pn = root_power(S.L, P, n, S.N);
    if (Pn.depth < 0) throw arith_error("res_density: truncation depth insufficient");
    return Pn.res();
}

// H_n = (N/n) * [Res L^{n/N}]_0
template <class K>
Functional<K> hamiltonian_res(const KdVState<K>& S, int n, int K_depth = -1) {
    Functional<K> H;
    H.value = res_density(S, n, K_depth).mode(0).scaled(K::from_rat(Rat(S.N, n)));
    H.built_window = S.window;
    H.degree = n;
    return H;
}

template <class K>
struct CwfResult {
    std::vector<Series<K>> h;        // h_1..h_n (index 0 unused)
    std::vector<Series<K>> witness;  // g_n with (1-D) g_n = h_n - (1/n) Res L^{n/N}
    bool witness_ok = true;
};

// Second construction of the hamiltonian densities: h_n are the t^{-n}
// coefficients of -log(1 + sum_i f_i t^{-i-1}) for the expansion
// D = P + sum f_i P^{-i}; each h_n matches (1/n) Res L^{n/N} up to an
// explicit total difference.
template <class K>
CwfResult<K> hamiltonian_cwf(const KdVState<K>& S, int n_max, int K_depth = -1) {
    if (K_depth < 0) K_depth = default_root_depth(n_max, S.N) + n_max + 2;
    PdOp<Series<K>> P = nth_root(S.L, S.N, K_depth);
    std::vector<Series<K>> f = expand_in_root(P, n_max);
    // F(tau) = sum_{i>=0} f_i tau^{-i-1}, kept as coefficients of tau^{-d}
    std::vector<Series<K>> F(static_cast<size_t>(n_max) + 1);
    for (int i = 0; i + 1 <= n_max; ++i) F[static_cast<size_t>(i + 1)] = f[static_cast<size_t>(i)];
    std::vector<Series<K>> acc(static_cast<size_t>(n_max) + 1);  // -log(1+F)
    std::vector<Series<K>> pw(static_cast<size_t>(n_max) + 1);
    pw[0] = Series<K>::one();
    for (int k = 1; k <= n_max; ++k) {
        // pw <- pw * F, truncated at tau^{-n_max}
        std::vector<Series<K>> nxt(static_cast<size_t>(n_max) + 1);
        for (int d1 = 0; d1 <= n_max; ++d1) {
            if (pw[static_cast<size_t>(d1)].is_zero()) continue;
            for (int d2 = 1; d1 + d2 <= n_max; ++d2) {
                if (F[static_cast<size_t>(d2)].is_zero()) continue;
                nxt[static_cast<size_t>(d1 + d2)] += pw[static_cast<size_t>(d1)] * F[static_cast<size_t>(d2)];
            }
        }
        pw = std::move(nxt);
        Rat c = Rat((k % 2 == 0) ? 1 : -1, k);
        for (int d = 0; d <= n_max; ++d)
            if (!pw[static_cast<size_t>(d)].is_zero())
                acc[static_cast<size_t>(d)] += pw[static_cast<size_t>(d)].scaled(K::from_rat(c));
    }
    CwfResult<K> out;
    out.h.resize(static_cast<size_t>(n_max) + 1);
    out.witness.resize(static_cast<size_t>(n_max) + 1);
    for (int n = 1; n <= n_max; ++n) {
        out.h[static_cast<size_t>(n)] = acc[static_cast<size_t>(n)];
        Series<K> rn = root_power(S.L, P, n, S.N).res().scaled(K::from_rat(Rat(1, n)));
        Series<K> diff = acc[static_cast<size_t>(n)] - rn;
        Series<K> g = diff.total_difference_witness();  // throws when the 0th coefficient survives
        out.witness[static_cast<size_t>(n)] = g;
        if (!(g.apply_one_minus_shift() == diff)) out.witness_ok = false;
    }
    return out;
}

// Free q-KP operator D + p_0 + p_1 D^{-1} + ... + p_tail D^{-tail} on
// formal p generators.
template <class K>
PdOp<Series<K>> make_kp_operator(int tail, int window, const GenAssign<K>* assign = nullptr) {
    PdOp<Series<K>> P = PdOp<Series<K>>::d_power(1);
    for (int j = 0; j <= tail; ++j)
        P += PdOp<Series<K>>::from_coeff(generator_series<K>(Family::P, j, window, assign), -j);
    return P;
}

template <class K>
struct KpFlowResult {
    Deriv<K> deriv;
    int valid_tail = 0;  // images are exact for components <= valid_tail
};

// dP/dtau_n = [P, (P^n)_+] on the truncated KP phase space.
template <class K>
KpFlowResult<K> qkp_flow(const PdOp<Series<K>>& P, int n) {
    int tail = -P.bottom();
    PdOp<Series<K>> A = P.pow(n).plus_part();
    A.depth = kInfDepth;
    PdOp<Series<K>> F = commutator(P, A);
    if (F.top() > 0) throw arith_error("qkp_flow: flow escapes the KP shape");
    KpFlowResult<K> out;
    out.valid_tail = tail - n;
    for (int j = 0; j <= tail; ++j) {
        Series<K> rhs = F.coeff(-j);
        for (auto& [m, p] : rhs.c) out.deriv.img[Gen{Family::P, j, m}] = p;
    }
    return out;
}

// Linear functional ell_X(L) = int Res(L X).
template <class K>
Functional<K> linear_functional(const KdVState<K>& S, const PdOp<Series<K>>& X) {
    Functional<K> f;
    f.value = (S.L * X).res().mode(0);
    f.built_window = S.window;
    f.degree = 1;
    return f;
}

}  // namespace qlax
