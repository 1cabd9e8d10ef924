#include "toda.hpp"

namespace qlax {

QRat lam_q_kernel(int N, int j, int k) {
    auto one_minus_xk = [](int e) { return QRat(QPoly::one() - QPoly::monomial(Rat(1), e), QPoly::one()); };
    QRat den = one_minus_xk(N);
    if (j == k) return -(one_minus_xk(N - 1) / den);
    int s = (j < k) ? (N + j - k - 1) : (j - k - 1);
    QRat xs(QPoly::monomial(Rat(1), s), QPoly::one());
    return xs * one_minus_xk(1) / den;
}

}  // namespace qlax
