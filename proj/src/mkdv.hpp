#pragma once

#include "kdv.hpp"

namespace qlax {

template <class K>
struct MKdVState {
    int N = 2;
    int window = 2;
    bool reduced = false;
    int degcap = kNoCap;                // cap used by the reduced elimination
    std::vector<Series<K>> lam;         // 1..N (index 0 unused)

    int wrap(int i) const { return ((i - 1) % N + N) % N + 1; }

    static MKdVState make(int N, int window, bool reduced, int degcap = 4,
                          const GenAssign<K>* assign = nullptr) {
        MKdVState s;
        s.N = N;
        s.window = window;
        s.reduced = reduced;
        s.lam.resize(static_cast<size_t>(N) + 1);
        for (int i = 1; i <= N; ++i)
            s.lam[static_cast<size_t>(i)] = generator_series<K>(Family::Lam, i, window, assign);
        if (reduced) {
            // eliminate the last field through Lam_N = (Lam_1...Lam_{N-1})^{-1}
            s.degcap = degcap;
            Series<K> prod = Series<K>::one();
            for (int i = 1; i < N; ++i) prod = prod * s.lam[static_cast<size_t>(i)];
            s.lam[static_cast<size_t>(N)] = prod.inverse(degcap);
        }
        return s;
    }
};

// L_i = (D - Lam_i)(D - Lam_{i+1}) ... (D - Lam_{i+N-1}), indices mod N.
template <class K>
PdOp<Series<K>> miura(const MKdVState<K>& S, int i) {
    PdOp<Series<K>> L = PdOp<Series<K>>::identity();
    for (int k = i; k <= i + S.N - 1; ++k) {
        PdOp<Series<K>> f = PdOp<Series<K>>::d_power(1);
        f -= PdOp<Series<K>>::from_coeff(S.lam[static_cast<size_t>(S.wrap(k))]);
        L = L * f;
    }
    return L;
}

// t_j image under the i-th Miura map, read off the product operator.
template <class K>
Series<K> miura_t_image(const MKdVState<K>& S, int i, int j) {
    PdOp<Series<K>> L = miura(S, i);
    int sign = (j % 2 == 0) ? 1 : -1;
    return L.coeff(S.N - j).scaled(K::from_long(sign));
}

template <class K>
struct LaxPair {
    MatOp<Series<K>> tL;
    MatOp<Series<K>> tP;
    std::vector<PdOp<Series<K>>> P;  // diagonal entries, 1..N
    std::vector<PdOp<Series<K>>> L;  // the Miura images they are roots of
};

template <class K>
MatOp<Series<K>> cyclic_lax_matrix(const MKdVState<K>& S) {
    MatOp<Series<K>> tL(S.N);
    for (int i = 1; i <= S.N; ++i) {
        PdOp<Series<K>> e = PdOp<Series<K>>::d_power(1);
        e -= PdOp<Series<K>>::from_coeff(S.lam[static_cast<size_t>(i)]);
        tL.at(i - 1, i % S.N) = e;
    }
    return tL;
}

// tP = diag(P_i) with P_i the N-th root of L_i; certifies [tL,tP] = 0 and
// tL^N = diag(L_i).
template <class K>
LaxPair<K> build_lax_pair(const MKdVState<K>& S, int K_depth) {
    LaxPair<K> lp;
    lp.tL = cyclic_lax_matrix(S);
    lp.P.resize(static_cast<size_t>(S.N) + 1);
    lp.L.resize(static_cast<size_t>(S.N) + 1);
    MatOp<Series<K>> tLN = lp.tL.pow(S.N);
    std::vector<PdOp<Series<K>>> diag;
    for (int i = 1; i <= S.N; ++i) {
        PdOp<Series<K>> Li = miura(S, i);
        lp.P[static_cast<size_t>(i)] = nth_root(Li, S.N, K_depth);
        lp.L[static_cast<size_t>(i)] = Li;
        diag.push_back(lp.P[static_cast<size_t>(i)]);
        if (!(tLN.at(i - 1, i - 1) - Li).is_zero())
            throw arith_error("build_lax_pair: tL^N is not diag(L_i)");
    }
    lp.tP = MatOp<Series<K>>::diag(diag);
    MatOp<Series<K>> C = commutator(lp.tL, lp.tP);
    if (!C.is_zero()) throw arith_error("build_lax_pair: [tL,tP] != 0 within guaranteed depth");
    return lp;
}

// d/dt_n tL = [tL, (tP^n)_+] read off the cyclic superdiagonal.
template <class K>
FlowResult<K> qmkdv_flow(const MKdVState<K>& S, const LaxPair<K>& lp, int n) {
    MatOp<Series<K>> Pn(S.N);
    for (int i = 1; i <= S.N; ++i)
        Pn.at(i - 1, i - 1) = root_power(lp.L[static_cast<size_t>(i)], lp.P[static_cast<size_t>(i)], n, S.N);
    MatOp<Series<K>> A = Pn.plus_part();
    for (auto& e : A.e) e.depth = kInfDepth;
    MatOp<Series<K>> F = commutator(lp.tL, A);
    FlowResult<K> out;
    for (int i = 1; i <= S.N; ++i) {
        for (int j = 1; j <= S.N; ++j) {
            const PdOp<Series<K>>& e = F.at(i - 1, j - 1);
            if (j == i % S.N + 1) continue;
            if (!e.is_zero()) throw arith_error("qmkdv_flow: flow leaves the cyclic shape");
        }
        const PdOp<Series<K>>& e = F.at(i - 1, i % S.N);
        if (e.top() > 0 || e.bottom() < 0)
            throw arith_error("qmkdv_flow: superdiagonal entry is not of order zero");
        Series<K> rhs = -e.coeff(0);
        out.rhs[i] = rhs;
        for (auto& [m, p] : rhs.c) out.deriv.img[Gen{Family::Lam, i, m}] = p;
    }
    return out;
}

// bold H_n = (1/n) * [Tr Res tP^n]_0; the summands [Res P_i^n]_0 agree for
// every i, which is checked on the way.
template <class K>
Functional<K> mkdv_hamiltonian(const MKdVState<K>& S, const LaxPair<K>& lp, int n) {
    Poly<K> first;
    Poly<K> total;
    for (int i = 1; i <= S.N; ++i) {
        PdOp<Series<K>> Pn = root_power(lp.L[static_cast<size_t>(i)], lp.P[static_cast<size_t>(i)], n, S.N);
        if (Pn.depth < 0) throw arith_error("mkdv_hamiltonian: depth insufficient");
        Poly<K> v = Pn.res().mode(0);
        if (i == 1)
            first = v;
        else if (!(v == first))
            throw arith_error("mkdv_hamiltonian: int Res P_i^n depends on i");
        total += v;
    }
    Functional<K> H;
    H.value = total.scaled(K::from_rat(Rat(1, n)));
    H.built_window = S.window;
    H.degree = n;
    return H;
}

}  // namespace qlax
