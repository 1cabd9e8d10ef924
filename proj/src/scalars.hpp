#pragma once

#include <map>

#include "rational.hpp"

namespace qlax {

// Coefficient field plugged into the whole engine. ExactField computes with
// rational functions of q and proves identities in q; NumericField fixes a
// generic rational q0 and is the fast regression mode.

struct ExactField {
    using Scalar = QRat;
    static const char* name() { return "exact"; }
    static Scalar zero() { return QRat(); }
    static Scalar one() { return QRat(1); }
    static Scalar from_long(long v) { return QRat(v); }
    static Scalar from_rat(const Rat& v) { return QRat(v); }
    static Scalar qpow(long m) { return QRat::q_power(m); }
    static Scalar from_qrat(const QRat& v) { return v; }
    // phi(q^m) for a kernel phi given as a rational function of x = q^m
    static Scalar eval_x(const QRat& phi, long m) { return phi.compose_power(m); }
    static bool is_zero(const Scalar& s) { return s.is_zero(); }
    static std::string str(const Scalar& s) { return s.str(); }

    // hot divisor inverses, memoized
    static const Scalar& cyclic_div_inv(int n, long m) {
        thread_local std::map<std::pair<int, long>, Scalar> cache;
        auto key = std::make_pair(n, m);
        auto it = cache.find(key);
        if (it == cache.end()) {
            Scalar d = zero();
            for (int j = 0; j < n; ++j) d = d + qpow(-static_cast<long>(j) * m);
            it = cache.emplace(key, one() / d).first;
        }
        return it->second;
    }
    static const Scalar& one_minus_shift_inv(long m) {
        thread_local std::map<long, Scalar> cache;
        auto it = cache.find(m);
        if (it == cache.end()) it = cache.emplace(m, one() / (one() - qpow(-m))).first;
        return it->second;
    }
};

struct NumericField {
    using Scalar = Rat;
    static const char* name() { return "numeric"; }
    static Rat& q0() {
        static Rat v(3, 2);
        return v;
    }
    static Scalar zero() { return Rat(0); }
    static Scalar one() { return Rat(1); }
    static Scalar from_long(long v) { return Rat(v); }
    static Scalar from_rat(const Rat& v) { return v; }
    static Scalar qpow(long m) { return rat_pow(q0(), m); }
    static Scalar from_qrat(const QRat& v) { return v.eval(q0()); }
    static Scalar eval_x(const QRat& phi, long m) { return phi.eval(rat_pow(q0(), m)); }
    static bool is_zero(const Scalar& s) { return s == 0; }
    static std::string str(const Scalar& s) { return rat_str(s); }

    static Scalar cyclic_div_inv(int n, long m) {
        Scalar d = 0;
        for (int j = 0; j < n; ++j) d += qpow(-static_cast<long>(j) * m);
        if (d == 0) throw arith_error("cyclic divisor vanishes at q0 (root of unity)");
        return Scalar(1) / d;
    }
    static Scalar one_minus_shift_inv(long m) {
        Scalar d = Scalar(1) - qpow(-m);
        if (d == 0) throw arith_error("1 - q^{-m} vanishes at q0");
        return Scalar(1) / d;
    }
};

}  // namespace qlax
