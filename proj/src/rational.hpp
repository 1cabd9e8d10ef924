#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlax {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct arith_error : std::runtime_error {
    explicit arith_error(const std::string& what) : std::runtime_error(what) {}
};

std::string rat_str(const Rat& r);
Rat rat_pow(const Rat& base, long e);

// Dense univariate polynomial in q over Rat, stored as a rational content
// times a primitive integer polynomial with positive leading coefficient, so
// ring operations run on machine integers and the content absorbs all
// rational bookkeeping.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(const Rat& c);
    explicit QPoly(long c);
    static QPoly monomial(const Rat& c, int deg);
    static QPoly q();  // the variable itself
    static QPoly one();

    int deg() const { return static_cast<int>(p_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return p_.empty(); }
    bool is_one() const;
    Rat coeff(int k) const;
    Rat lc() const;  // leading coefficient, poly must be nonzero
    const Rat& content() const { return c_; }

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator-() const;
    bool operator==(const QPoly& o) const { return c_ == o.c_ && p_ == o.p_; }

    QPoly scaled(const Rat& s) const;
    QPoly shifted(int k) const;  // multiply by q^k, k >= 0

    // Division with remainder over the rationals: *this = quo*d + rem.
    void divrem(const QPoly& d, QPoly& quo, QPoly& rem) const;
    QPoly exact_div(const QPoly& d) const;  // throws if not divisible

    Rat eval(const Rat& x) const;

    // p(q^m) as a Laurent monomial times a polynomial: returns (poly, shift)
    // with p(q^m) = q^shift * poly(q) and poly(0) != 0 (unless p == 0).
    std::pair<QPoly, long> compose_power(long m) const;

    static QPoly gcd(const QPoly& a, const QPoly& b);  // monic

    std::string str() const;

private:
    Rat c_ = 0;               // content, carries the sign; 0 iff the poly is zero
    std::vector<BigInt> p_;   // primitive, positive leading coefficient

    void normalize();  // strip zeros, extract the content
    friend class QRat;
    friend QPoly gcd_primitive(const QPoly&, const QPoly&);
};

// Rational function in q: num/den with gcd(num,den)=1 and monic den (the
// fixed canonical normalization), so equality is structural comparison.
class QRat {
public:
    QRat() : num_(), den_(QPoly::one()) {}
    QRat(const QPoly& n, const QPoly& d);
    explicit QRat(const Rat& c) : num_(c), den_(QPoly::one()) {}
    explicit QRat(long c) : num_(c), den_(QPoly::one()) {}
    static QRat q_power(long m);  // q^m, any sign of m
    static QRat one() { return QRat(1); }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }

    QRat operator+(const QRat& o) const;
    QRat operator-(const QRat& o) const;
    QRat operator*(const QRat& o) const;
    QRat operator/(const QRat& o) const;
    QRat operator-() const;
    QRat inv() const;
    bool operator==(const QRat& o) const { return num_ == o.num_ && den_ == o.den_; }

    QRat& operator+=(const QRat& o) { *this = *this + o; return *this; }
    QRat& operator*=(const QRat& o) { *this = *this * o; return *this; }

    // Substitute q := q^m (field endomorphism for m != 0; m == 0 evaluates
    // at q = 1 and requires the value to be finite).
    QRat compose_power(long m) const;

    Rat eval(const Rat& q0) const;  // throws on a pole

    std::string str() const;

private:
    QPoly num_, den_;
    void reduce();
};

// Truncated Laurent series in h: sum of c_[k] h^(lead_+k), with every term of
// exponent >= prec_ unknown. Finite pole order at h = 0 is allowed.
class HSeries {
public:
    explicit HSeries(int prec) : lead_(prec), prec_(prec) {}
    HSeries(int lead, int prec, std::vector<Rat> coeffs);
    static HSeries from_rat(const Rat& c, int prec);

    int prec() const { return prec_; }
    // Valuation: exponent of the first known nonzero term; prec() if none.
    int val() const;
    bool known_zero() const { return val() >= prec_; }
    Rat coeff(int e) const;  // throws if e >= prec_

    HSeries operator+(const HSeries& o) const;
    HSeries operator-(const HSeries& o) const;
    HSeries operator*(const HSeries& o) const;
    HSeries operator-() const;
    HSeries inv() const;  // throws if known_zero
    HSeries scaled(const Rat& s) const;
    HSeries truncated(int prec) const;
    bool matches(const HSeries& o) const;  // equal on the shared known range

    std::string str() const;

private:
    int lead_;
    int prec_;
    std::vector<Rat> c_;
    void normalize();
};

// Laurent expansion of a(e^h) around h = 0, valid below order prec
// (i.e. all terms h^e with e < prec are exact).
HSeries h_expand(const QRat& a, int prec);

// e^(k h) as a series with terms below prec.
HSeries exp_series(long k, int prec);

}  // namespace qlax
