#pragma once

#include "modering.hpp"

namespace qlax {

constexpr int kInfDepth = 1 << 28;

inline int depth_min(int a, int b) { return a < b ? a : b; }
inline int depth_sub(int d, int k) { return d >= kInfDepth ? kInfDepth : d - k; }

// Pseudo-difference operator sum_{n <= top} c_n D^n over a coefficient ring
// R (a z-series type). Coefficients at exponents >= -depth are exact; what
// lies below has been truncated away and is dropped from storage.
template <class R>
class PdOp {
public:
    std::map<int, R> c;
    int depth = kInfDepth;

    PdOp() = default;
    static PdOp zero() { return PdOp(); }
    static PdOp identity() { return d_power(0); }
    static PdOp d_power(int n) {
        PdOp a;
        a.c[n] = R::one();
        return a;
    }
    static PdOp from_coeff(const R& r, int n = 0) {
        PdOp a;
        if (!r.is_zero()) a.c[n] = r;
        return a;
    }

    bool is_zero() const { return c.empty(); }
    bool operator==(const PdOp& o) const { return c == o.c; }
    int top() const { return c.empty() ? -kInfDepth : c.rbegin()->first; }
    int bottom() const { return c.empty() ? kInfDepth : c.begin()->first; }
    R coeff(int n) const {
        auto it = c.find(n);
        return it == c.end() ? R() : it->second;
    }

    void clip() {
        for (auto it = c.begin(); it != c.end();) {
            if (it->first < -depth || it->second.is_zero())
                it = c.erase(it);
            else
                ++it;
        }
    }

    PdOp operator+(const PdOp& o) const {
        PdOp r = *this;
        r.depth = depth_min(depth, o.depth);
        for (auto& [n, v] : o.c) {
            auto it = r.c.find(n);
            if (it == r.c.end())
                r.c[n] = v;
            else
                it->second += v;
        }
        r.clip();
        return r;
    }
    PdOp operator-(const PdOp& o) const { return *this + (-o); }
    PdOp operator-() const {
        PdOp r = *this;
        for (auto& [n, v] : r.c) v = -v;
        return r;
    }
    PdOp& operator+=(const PdOp& o) { *this = *this + o; return *this; }
    PdOp& operator-=(const PdOp& o) { *this = *this - o; return *this; }

    // D^a f = f(z q^a) D^a drives the product rule
    PdOp operator*(const PdOp& o) const {
        PdOp r;
        if (is_zero() || o.is_zero()) return r;
        r.depth = depth_min(depth_sub(depth, o.top()), depth_sub(o.depth, top()));
        for (auto& [a, f] : c)
            for (auto& [b, g] : o.c) {
                if (a + b < -r.depth) continue;
                R h = f * g.q_shift(a);
                if (h.is_zero()) continue;
                auto it = r.c.find(a + b);
                if (it == r.c.end())
                    r.c[a + b] = std::move(h);
                else
                    it->second += h;
            }
        r.clip();
        return r;
    }

    // product with every exponent below emin discarded (the depth bound still
    // reflects what would have been exact)
    PdOp mul_bounded(const PdOp& o, int emin) const {
        PdOp r;
        if (is_zero() || o.is_zero()) return r;
        r.depth = depth_min(depth_sub(depth, o.top()), depth_sub(o.depth, top()));
        r.depth = depth_min(r.depth, -emin);
        for (auto& [a, f] : c)
            for (auto& [b, g] : o.c) {
                if (a + b < emin) continue;
                R h = f * g.q_shift(a);
                if (h.is_zero()) continue;
                auto it = r.c.find(a + b);
                if (it == r.c.end())
                    r.c[a + b] = std::move(h);
                else
                    it->second += h;
            }
        r.clip();
        return r;
    }

    PdOp pow(int n) const {
        PdOp r = identity();
        for (int i = 0; i < n; ++i) r = r * (*this);
        return r;
    }

    PdOp plus_part() const {
        PdOp r;
        r.depth = depth;
        for (auto& [n, v] : c)
            if (n >= 0) r.c[n] = v;
        return r;
    }
    PdOp minus_part() const {
        PdOp r;
        r.depth = depth;
        for (auto& [n, v] : c)
            if (n < 0) r.c[n] = v;
        return r;
    }
    R res() const { return coeff(0); }

    // equality of all coefficients at exponents >= -d
    bool eq_to_depth(const PdOp& o, int d) const {
        if (d > depth || d > o.depth)
            throw arith_error("eq_to_depth: requested depth exceeds guaranteed depth");
        std::set<int> ns;
        for (auto& [n, v] : c)
            if (n >= -d) ns.insert(n);
        for (auto& [n, v] : o.c)
            if (n >= -d) ns.insert(n);
        for (int n : ns)
            if (!(coeff(n) == o.coeff(n))) return false;
        return true;
    }

    std::string str() const {
        if (c.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            if (!first) os << " + ";
            os << "(" << it->second.str() << ")";
            if (it->first != 0) os << "*D^" << it->first;
            first = false;
        }
        return os.str();
    }
};

template <class R>
PdOp<R> commutator(const PdOp<R>& a, const PdOp<R>& b) {
    return a * b - b * a;
}

// Unique N-th root P = D + p_0 + p_{-1} D^{-1} + ... of a monic operator
// L = D^N + lower; each order reduces to one cyclic-sum inversion. Only the
// single needed coefficient of P^N is assembled per order.
template <class K>
PdOp<Series<K>> nth_root(const PdOp<Series<K>>& L, int N, int K_depth) {
    if (N < 1) throw arith_error("nth_root: N must be positive");
    if (!(L.coeff(N) == Series<K>::one()) || L.top() != N)
        throw arith_error("nth_root: operator is not monic of order N");
    PdOp<Series<K>> P = PdOp<Series<K>>::d_power(1);
    P.depth = K_depth;
    for (int k = 0; k <= K_depth; ++k) {
        int e = N - 1 - k;
        Series<K> pe;
        if (N == 2) {
            // single-coefficient convolution, nothing above the band
            for (auto& [a, f] : P.c) {
                auto it = P.c.find(e - a);
                if (it == P.c.end()) continue;
                pe += f * it->second.q_shift(a);
            }
        } else {
            PdOp<Series<K>> C = P;
            for (int j = 2; j <= N; ++j) C = C.mul_bounded(P, e - (N - j));
            pe = C.coeff(e);
        }
        Series<K> rhs = L.coeff(e) - pe;
        if (rhs.is_zero()) continue;
        P.c[-k] = rhs.cyclic_invert(N);
        if (P.c[-k].is_zero()) P.c.erase(-k);
    }
    return P;
}

// P^n through the defining relation P^N = L: the expensive self-products of
// the root are replaced by powers of the finite operator L.
template <class K>
PdOp<Series<K>> root_power(const PdOp<Series<K>>& L, const PdOp<Series<K>>& P, int n, int N) {
    PdOp<Series<K>> r = PdOp<Series<K>>::identity();
    for (int a = 0; a < n / N; ++a) r = r * L;
    for (int b = 0; b < n % N; ++b) r = r * P;
    // guarantee matches the depth a direct power would certify
    r.depth = depth_min(r.depth, depth_sub(P.depth, n - 1));
    r.clip();
    return r;
}

template <class K>
Series<K> unit_inverse(const Series<K>& s, int degcap) {
    return s.inverse(degcap);
}

// Right inverse: A * inv = 1 exactly on exponents >= -K. The leading
// coefficient must be a unit (inverted through the capped geometric series
// when it is a genuine series).
template <class R>
PdOp<R> op_inverse(const PdOp<R>& A, int K_depth, int degcap = 8) {
    if (A.is_zero()) throw arith_error("op_inverse: zero operator");
    int M = A.top();
    if (A.depth < K_depth - M) throw arith_error("op_inverse: operator depth insufficient");
    R lead_inv = unit_inverse(A.coeff(M), degcap);
    PdOp<R> B;
    B.depth = M + K_depth;
    B.c[-M] = lead_inv.q_shift(-M);
    for (int e = -1; e >= -K_depth; --e) {
        // sum over known b's: a_n * q_shift(b_k, n), n + k = e, k > e - M
        R s;
        for (auto& [n, an] : A.c) {
            if (n == M) continue;
            int k = e - n;
            auto it = B.c.find(k);
            if (it == B.c.end()) continue;
            s += an * it->second.q_shift(n);
        }
        if (s.is_zero()) continue;
        B.c[e - M] = (lead_inv * (-s)).q_shift(-M);
    }
    for (auto it = B.c.begin(); it != B.c.end();)
        it = it->second.is_zero() ? B.c.erase(it) : std::next(it);
    return B;
}

// Coefficients f_i of the expansion D = P + sum_{i>=0} f_i P^{-i}, solved
// top-down; returns f_0..f_K.
template <class K>
std::vector<Series<K>> expand_in_root(const PdOp<Series<K>>& P, int K_count) {
    if (!(P.coeff(1) == Series<K>::one()) || P.top() != 1)
        throw arith_error("expand_in_root: P must have the shape D + lower");
    PdOp<Series<K>> Pinv = op_inverse(P, K_count + 2);
    PdOp<Series<K>> S = PdOp<Series<K>>::d_power(1) - P;
    std::vector<Series<K>> f;
    PdOp<Series<K>> pw = PdOp<Series<K>>::identity();
    for (int i = 0; i <= K_count; ++i) {
        Series<K> fi = S.coeff(-i);
        f.push_back(fi);
        if (!fi.is_zero()) S -= PdOp<Series<K>>::from_coeff(fi) * pw;
        pw = pw * Pinv;
    }
    return f;
}

// Dense square matrix of operators (N <= 5 in practice).
template <class R>
class MatOp {
public:
    int n = 0;
    std::vector<PdOp<R>> e;

    MatOp() = default;
    explicit MatOp(int size) : n(size), e(static_cast<size_t>(size) * size) {}
    static MatOp identity(int size) {
        MatOp m(size);
        for (int i = 0; i < size; ++i) m.at(i, i) = PdOp<R>::identity();
        return m;
    }
    static MatOp diag(const std::vector<PdOp<R>>& d) {
        MatOp m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n; ++i) m.at(i, i) = d[static_cast<size_t>(i)];
        return m;
    }

    PdOp<R>& at(int i, int j) { return e[static_cast<size_t>(i) * n + j]; }
    const PdOp<R>& at(int i, int j) const { return e[static_cast<size_t>(i) * n + j]; }

    MatOp operator+(const MatOp& o) const {
        check(o);
        MatOp r(n);
        for (size_t k = 0; k < e.size(); ++k) r.e[k] = e[k] + o.e[k];
        return r;
    }
    MatOp operator-(const MatOp& o) const {
        check(o);
        MatOp r(n);
        for (size_t k = 0; k < e.size(); ++k) r.e[k] = e[k] - o.e[k];
        return r;
    }
    MatOp operator*(const MatOp& o) const {
        check(o);
        MatOp r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                PdOp<R> s;
                for (int k = 0; k < n; ++k)
                    if (!at(i, k).is_zero() && !o.at(k, j).is_zero()) s += at(i, k) * o.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }
    MatOp pow(int p) const {
        MatOp r = identity(n);
        for (int i = 0; i < p; ++i) r = r * (*this);
        return r;
    }
    MatOp plus_part() const {
        MatOp r(n);
        for (size_t k = 0; k < e.size(); ++k) r.e[k] = e[k].plus_part();
        return r;
    }
    bool is_zero() const {
        for (auto& x : e)
            if (!x.is_zero()) return false;
        return true;
    }
    int min_depth() const {
        int d = kInfDepth;
        for (auto& x : e) d = depth_min(d, x.depth);
        return d;
    }

private:
    void check(const MatOp& o) const {
        if (n != o.n) throw arith_error("matrix size mismatch");
    }
};

template <class R>
MatOp<R> commutator(const MatOp<R>& a, const MatOp<R>& b) {
    return a * b - b * a;
}

}  // namespace qlax
