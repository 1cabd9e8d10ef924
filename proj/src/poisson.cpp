#include "poisson.hpp"

namespace qlax {

namespace {

QRat one_minus_xk(int k) {
    // 1 - x^k
    return QRat(QPoly::one() - QPoly::monomial(Rat(1), k), QPoly::one());
}

DeltaTerm::Factor t_factor(int comp, bool at_z, int N, bool reduced) {
    DeltaTerm::Factor f;
    f.fam = Family::T;
    f.comp = comp;
    f.at_z = at_z;
    f.unit = (comp == 0) || (reduced && comp == N);
    return f;
}

}  // namespace

KernelTable kdv_first_bracket(int N, bool reduced) {
    KernelTable t;
    t.name = "first";
    int live = reduced ? N - 1 : N;
    for (int i = 1; i <= live; ++i)
        for (int j = 1; j <= live; ++j) {
            if (i == N || j == N || i + j < N) continue;
            KernelEntry row;
            row.fam_i = row.fam_j = Family::T;
            row.ci = i;
            row.cj = j;
            row.derive_swap = false;  // stated for every admissible pair
            DeltaTerm d1;
            d1.shift = N - j;
            d1.coef = QRat(1);
            d1.u = t_factor(N, true, N, reduced);
            d1.v = t_factor(i + j - N, false, N, reduced);
            DeltaTerm d2;
            d2.shift = -(N - i);
            d2.coef = QRat(-1);
            d2.u = t_factor(i + j - N, true, N, reduced);
            d2.v = t_factor(N, false, N, reduced);
            row.deltas = {d1, d2};
            t.rows.push_back(row);
        }
    return t;
}

KernelTable kdv_second_bracket(int N, bool reduced) {
    KernelTable t;
    t.name = "second";
    int live = reduced ? N - 1 : N;
    for (int i = 1; i <= live; ++i)
        for (int j = i; j <= live; ++j) {
            KernelEntry row;
            row.fam_i = row.fam_j = Family::T;
            row.ci = i;
            row.cj = j;
            row.derive_swap = (i != j);
            row.phi = one_minus_xk(i) * one_minus_xk(N - j) / one_minus_xk(N);
            for (int r = 1; r <= std::min(i, N - j); ++r) {
                DeltaTerm d1;
                d1.shift = r;
                d1.coef = QRat(1);
                d1.u = t_factor(j + r, true, N, reduced);
                d1.v = t_factor(i - r, false, N, reduced);
                DeltaTerm d2;
                d2.shift = -(j - i + r);
                d2.coef = QRat(-1);
                d2.u = t_factor(i - r, true, N, reduced);
                d2.v = t_factor(j + r, false, N, reduced);
                row.deltas.push_back(d1);
                row.deltas.push_back(d2);
            }
            t.rows.push_back(row);
        }
    return t;
}

KernelTable mkdv_bracket(int N) {
    KernelTable t;
    t.name = "heisenberg";
    QRat den = one_minus_xk(N);
    for (int i = 1; i <= N; ++i)
        for (int j = i; j <= N; ++j) {
            KernelEntry row;
            row.fam_i = row.fam_j = Family::Lam;
            row.ci = i;
            row.cj = j;
            row.derive_swap = (i != j);
            if (i == j) {
                row.phi = one_minus_xk(1) * one_minus_xk(N - 1) / den;
            } else {
                QRat xs(QPoly::monomial(Rat(1), N + i - j - 1), QPoly::one());
                row.phi = -(xs * one_minus_xk(1) * one_minus_xk(1) / den);
            }
            t.rows.push_back(row);
        }
    return t;
}

}  // namespace qlax
