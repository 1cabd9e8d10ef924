#include "rational.hpp"

#include <algorithm>
#include <sstream>

namespace qlax {

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (e < 0) {
        if (base == 0) throw arith_error("rat_pow: zero to negative power");
        return Rat(1) / rat_pow(base, -e);
    }
    Rat acc(1), b = base;
    long k = e;
    while (k > 0) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

namespace {

using ZP = std::vector<BigInt>;

void ztrim(ZP& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

BigInt zcontent(const ZP& p) {
    BigInt g = 0;
    for (const auto& c : p) {
        g = boost::multiprecision::gcd(g, c);
        if (g == 1) break;
    }
    return g;
}

unsigned bit_bound(const ZP& p) {
    unsigned b = 1;
    for (const auto& c : p) {
        unsigned m = c == 0 ? 1 : static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(c)) + 1);
        if (m > b) b = m;
    }
    return b;
}

// Kronecker substitution: evaluate at 2^slot, one big multiplication, unpack
// with symmetric residues. Valid whenever the product coefficients fit below
// 2^(slot-1).
ZP zmul_kronecker(const ZP& a, const ZP& b, unsigned slot) {
    BigInt pa = 0, pb = 0;
    for (size_t i = a.size(); i-- > 0;) {
        pa <<= slot;
        pa += a[i];
    }
    for (size_t i = b.size(); i-- > 0;) {
        pb <<= slot;
        pb += b[i];
    }
    BigInt prod = pa * pb;
    ZP r(a.size() + b.size() - 1);
    const BigInt base = BigInt(1) << slot;
    const BigInt half = BigInt(1) << (slot - 1);
    for (size_t i = 0; i < r.size(); ++i) {
        BigInt digit = prod & (base - 1);
        if (digit >= half) {
            digit -= base;
        }
        r[i] = digit;
        prod -= digit;
        prod >>= slot;
    }
    ztrim(r);
    return r;
}

ZP zmul(const ZP& a, const ZP& b) {
    if (a.empty() || b.empty()) return {};
    if (a.size() > 8 && b.size() > 8) {
        unsigned slot = bit_bound(a) + bit_bound(b) + 2;
        unsigned lenbits = 1;
        size_t n = std::min(a.size(), b.size());
        while ((size_t{1} << lenbits) < n) ++lenbits;
        slot += lenbits;
        if (slot < 512) return zmul_kronecker(a, b, slot);
    }
    ZP r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    ztrim(r);
    return r;
}

// exact division of primitive polynomials over Z; empty result flags failure
bool zexact_div(const ZP& a, const ZP& d, ZP& quo) {
    if (d.empty()) return false;
    if (a.empty()) {
        quo.clear();
        return true;
    }
    if (a.size() < d.size()) return false;
    ZP rem = a;
    quo.assign(a.size() - d.size() + 1, BigInt(0));
    const BigInt& lcd = d.back();
    for (size_t k = a.size() - d.size() + 1; k-- > 0;) {
        BigInt top = rem[k + d.size() - 1];
        if (top == 0) continue;
        if (top % lcd != 0) return false;
        BigInt f = top / lcd;
        quo[k] = f;
        for (size_t i = 0; i < d.size(); ++i) rem[k + i] -= f * d[i];
    }
    for (const auto& c : rem)
        if (c != 0) return false;
    return true;
}

// lc(b)^(da-db+1) * a mod b over Z
ZP zprem(ZP a, const ZP& b) {
    int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
    const BigInt lb = b.back();
    while (da >= db) {
        BigInt la = a[static_cast<size_t>(da)];
        for (auto& c : a) c *= lb;
        for (int i = 0; i <= db; ++i) a[static_cast<size_t>(da - db + i)] -= la * b[static_cast<size_t>(i)];
        a.resize(static_cast<size_t>(da));
        ztrim(a);
        da = static_cast<int>(a.size()) - 1;
    }
    return a;
}

void zprim(ZP& p) {
    BigInt g = zcontent(p);
    if (g == 0 || g == 1) return;
    for (auto& c : p) c /= g;
}

// --- modular gcd screen ----------------------------------------------------
// One prime not dividing both leading coefficients bounds the gcd degree;
// degree zero proves coprimality, and a reconstructed candidate is accepted
// only after exact division.

constexpr uint64_t kGcdPrimes[] = {2305843009213693951ull /* 2^61-1 */, 2305843009213693669ull,
                                   2305843009213693381ull};

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a % p, p - 2, p); }

uint64_t bigint_mod(const BigInt& v, uint64_t p) {
    BigInt r = v % p;
    if (r < 0) r += p;
    return r.convert_to<uint64_t>();
}

using MPoly = std::vector<uint64_t>;

void mtrim(MPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

MPoly to_mpoly(const ZP& z, uint64_t p) {
    MPoly f(z.size());
    for (size_t i = 0; i < z.size(); ++i) f[i] = bigint_mod(z[i], p);
    mtrim(f);
    return f;
}

MPoly mgcd(MPoly a, MPoly b, uint64_t p) {
    while (!b.empty()) {
        uint64_t inv = invmod(b.back(), p);
        while (a.size() >= b.size() && !a.empty()) {
            uint64_t f = mulmod(a.back(), inv, p);
            size_t off = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i) {
                uint64_t sub = mulmod(f, b[i], p);
                a[off + i] = (a[off + i] >= sub) ? a[off + i] - sub : a[off + i] + p - sub;
            }
            mtrim(a);
        }
        std::swap(a, b);
    }
    return a;
}

// rational reconstruction of c mod p with numerator and denominator < 2^30
bool rat_reconstruct(uint64_t c, uint64_t p, Rat& out) {
    using I = long long;
    const I bound = 1ll << 30;
    I r0 = static_cast<I>(p), r1 = static_cast<I>(c % p);
    I t0 = 0, t1 = 1;
    while (r1 >= bound) {
        I q = r0 / r1;
        I r2 = r0 - q * r1;
        I t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if (t1 == 0) return false;
    I n = r1, d = t1;
    if (d < 0) {
        d = -d;
        n = -n;
    }
    if (d > bound || std::llabs(n) > bound) return false;
    out = Rat(n, d);
    return true;
}

// primitive positive-lc gcd over Z, with the modular screen in front
ZP zgcd(ZP x, ZP y) {
    zprim(x);
    zprim(y);
    if (x.size() < y.size()) std::swap(x, y);
    if (y.empty()) return x;
    if (y.size() == 1) return {BigInt(1)};
    for (uint64_t p : kGcdPrimes) {
        if (bigint_mod(x.back(), p) == 0 || bigint_mod(y.back(), p) == 0) continue;
        MPoly g = mgcd(to_mpoly(x, p), to_mpoly(y, p), p);
        if (g.size() <= 1) return {BigInt(1)};
        // lift the monic modular gcd and clear denominators
        uint64_t inv = invmod(g.back(), p);
        std::vector<Rat> lifted(g.size());
        bool ok = true;
        BigInt den_lcm = 1;
        for (size_t i = 0; i < g.size() && ok; ++i) {
            ok = rat_reconstruct(mulmod(g[i], inv, p), p, lifted[i]);
            if (ok) den_lcm = boost::multiprecision::lcm(den_lcm, boost::multiprecision::denominator(lifted[i]));
        }
        if (!ok) break;
        ZP cand(g.size());
        for (size_t i = 0; i < g.size(); ++i) {
            Rat v = lifted[i] * Rat(den_lcm);
            cand[i] = boost::multiprecision::numerator(v);
        }
        zprim(cand);
        ZP q;
        if (!zexact_div(x, cand, q)) break;
        if (!zexact_div(y, cand, q)) break;
        if (cand.back() < 0)
            for (auto& c : cand) c = -c;
        return cand;
    }
    // primitive PRS fallback
    while (y.size() > 1) {
        ZP r = zprem(x, y);
        zprim(r);
        x = std::move(y);
        y = std::move(r);
    }
    if (!y.empty()) return {BigInt(1)};
    if (x.back() < 0)
        for (auto& c : x) c = -c;
    return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// QPoly

void QPoly::normalize() {
    ztrim(p_);
    if (p_.empty()) {
        c_ = 0;
        return;
    }
    BigInt g = zcontent(p_);
    bool neg = p_.back() < 0;
    if (neg) g = -g;
    if (g != 1)
        for (auto& c : p_) c /= g;
    c_ *= Rat(g);
    if (c_ == 0) p_.clear();
}

QPoly::QPoly(const Rat& c) {
    if (c != 0) {
        c_ = c;
        p_ = {BigInt(1)};
    }
}

QPoly::QPoly(long c) {
    if (c != 0) {
        c_ = Rat(c);
        p_ = {BigInt(1)};
    }
}

QPoly QPoly::monomial(const Rat& c, int deg) {
    QPoly p;
    if (c != 0) {
        p.c_ = c;
        p.p_.assign(static_cast<size_t>(deg) + 1, BigInt(0));
        p.p_.back() = 1;
    }
    return p;
}

QPoly QPoly::q() { return monomial(Rat(1), 1); }
QPoly QPoly::one() { return QPoly(1); }

bool QPoly::is_one() const { return p_.size() == 1 && c_ == 1; }

Rat QPoly::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(p_.size())) return Rat(0);
    return c_ * Rat(p_[static_cast<size_t>(k)]);
}

Rat QPoly::lc() const {
    if (p_.empty()) throw arith_error("lc of zero polynomial");
    return c_ * Rat(p_.back());
}

QPoly QPoly::operator+(const QPoly& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    // c_a A + c_b B = (na*db*A + nb*da*B) / (da*db)
    const BigInt &na = boost::multiprecision::numerator(c_), &da = boost::multiprecision::denominator(c_);
    const BigInt &nb = boost::multiprecision::numerator(o.c_), &db = boost::multiprecision::denominator(o.c_);
    BigInt fa = na * db, fb = nb * da;
    QPoly r;
    r.p_.assign(std::max(p_.size(), o.p_.size()), BigInt(0));
    for (size_t i = 0; i < p_.size(); ++i) r.p_[i] = fa * p_[i];
    for (size_t i = 0; i < o.p_.size(); ++i) r.p_[i] += fb * o.p_[i];
    r.c_ = Rat(BigInt(1), da * db);
    r.normalize();
    return r;
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator-() const {
    QPoly r = *this;
    r.c_ = -r.c_;
    return r;
}

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return QPoly();
    QPoly r;
    r.c_ = c_ * o.c_;
    r.p_ = zmul(p_, o.p_);  // primitive by the Gauss lemma
    return r;
}

QPoly QPoly::scaled(const Rat& s) const {
    if (s == 0 || is_zero()) return QPoly();
    QPoly r = *this;
    r.c_ *= s;
    return r;
}

QPoly QPoly::shifted(int k) const {
    if (is_zero() || k == 0) return *this;
    QPoly r = *this;
    r.p_.insert(r.p_.begin(), static_cast<size_t>(k), BigInt(0));
    return r;
}

void QPoly::divrem(const QPoly& d, QPoly& quo, QPoly& rem) const {
    if (d.is_zero()) throw arith_error("polynomial division by zero");
    // plain long division over the rationals (cold path)
    std::vector<Rat> r(static_cast<size_t>(deg() + 1));
    for (int k = 0; k <= deg(); ++k) r[static_cast<size_t>(k)] = coeff(k);
    std::vector<Rat> qv;
    int dd = d.deg();
    Rat dl = d.lc();
    int rd = deg();
    if (rd >= dd) qv.assign(static_cast<size_t>(rd - dd) + 1, Rat(0));
    while (rd >= dd) {
        Rat f = r[static_cast<size_t>(rd)] / dl;
        qv[static_cast<size_t>(rd - dd)] = f;
        for (int i = 0; i <= dd; ++i) r[static_cast<size_t>(rd - dd + i)] -= f * d.coeff(i);
        while (rd >= 0 && r[static_cast<size_t>(rd)] == 0) --rd;
    }
    quo = QPoly();
    for (size_t k = 0; k < qv.size(); ++k)
        if (qv[k] != 0) quo = quo + monomial(qv[k], static_cast<int>(k));
    rem = QPoly();
    for (int k = 0; k <= rd; ++k)
        if (r[static_cast<size_t>(k)] != 0) rem = rem + monomial(r[static_cast<size_t>(k)], k);
}

QPoly QPoly::exact_div(const QPoly& d) const {
    if (d.is_zero()) throw arith_error("polynomial division by zero");
    if (is_zero()) return QPoly();
    ZP q;
    if (zexact_div(p_, d.p_, q)) {
        QPoly r;
        r.c_ = c_ / d.c_;
        r.p_ = std::move(q);
        r.normalize();
        return r;
    }
    QPoly quo, rem;
    divrem(d, quo, rem);
    if (!rem.is_zero()) throw arith_error("exact_div: not divisible");
    return quo;
}

Rat QPoly::eval(const Rat& x) const {
    if (is_zero()) return Rat(0);
    Rat acc(0);
    for (size_t i = p_.size(); i-- > 0;) acc = acc * x + Rat(p_[i]);
    return acc * c_;
}

std::pair<QPoly, long> QPoly::compose_power(long m) const {
    if (is_zero()) return {QPoly(), 0};
    if (m == 0) return {QPoly(eval(Rat(1))), 0};
    QPoly p;
    p.c_ = c_;
    int D = deg();
    if (m > 0) {
        p.p_.assign(static_cast<size_t>(D) * m + 1, BigInt(0));
        for (size_t i = 0; i < p_.size(); ++i) p.p_[i * static_cast<size_t>(m)] = p_[i];
        return {p, 0};
    }
    long mm = -m;
    p.p_.assign(static_cast<size_t>(D) * mm + 1, BigInt(0));
    for (size_t i = 0; i < p_.size(); ++i)
        p.p_[static_cast<size_t>(D - static_cast<int>(i)) * mm] = p_[i];
    long shift = m * D;
    size_t v = 0;
    while (v < p.p_.size() && p.p_[v] == 0) ++v;
    if (v > 0) {
        p.p_.erase(p.p_.begin(), p.p_.begin() + static_cast<long>(v));
        shift += static_cast<long>(v);
    }
    return {p, shift};
}

QPoly gcd_primitive(const QPoly& a, const QPoly& b) {
    QPoly g;
    g.p_ = zgcd(a.p_, b.p_);
    g.c_ = 1;
    if (g.p_.empty()) g.c_ = 0;
    return g;
}

QPoly QPoly::gcd(const QPoly& a, const QPoly& b) {
    if (a.is_zero() && b.is_zero()) return QPoly();
    if (a.is_zero() || b.is_zero()) {
        const QPoly& n = a.is_zero() ? b : a;
        return n.scaled(Rat(1) / n.lc());
    }
    if (a.deg() == 0 || b.deg() == 0) return QPoly::one();
    QPoly g = gcd_primitive(a, b);
    return g.scaled(Rat(1) / g.lc());
}

std::string QPoly::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k <= deg(); ++k) {
        Rat c = coeff(k);
        if (c == 0) continue;
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        Rat a = c < 0 ? Rat(-c) : c;
        if (k == 0) {
            os << rat_str(a);
        } else {
            if (a != 1) os << rat_str(a) << "*";
            os << "q";
            if (k > 1) os << "^" << k;
        }
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// QRat

QRat::QRat(const QPoly& n, const QPoly& d) : num_(n), den_(d) {
    if (den_.is_zero()) throw arith_error("QRat: zero denominator");
    reduce();
}

void QRat::reduce() {
    if (num_.is_zero()) {
        den_ = QPoly::one();
        return;
    }
    if (den_.deg() > 0 && num_.deg() > 0) {
        QPoly g = gcd_primitive(num_, den_);
        if (g.deg() > 0) {
            num_ = num_.exact_div(g);
            den_ = den_.exact_div(g);
        }
    }
    // canonical form: monic denominator
    Rat l = den_.lc();
    if (l != 1) {
        den_.c_ /= l;
        num_.c_ /= l;
    }
}

QRat QRat::q_power(long m) {
    QRat r;
    if (m >= 0) {
        r.num_ = QPoly::monomial(Rat(1), static_cast<int>(m));
        r.den_ = QPoly::one();
    } else {
        r.num_ = QPoly::one();
        r.den_ = QPoly::monomial(Rat(1), static_cast<int>(-m));
    }
    return r;
}

QRat QRat::operator+(const QRat& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    QRat r;
    if (den_ == o.den_) {
        r.num_ = num_ + o.num_;
        r.den_ = den_;
        if (r.num_.is_zero()) return QRat();
    } else {
        r.num_ = num_ * o.den_ + o.num_ * den_;
        r.den_ = den_ * o.den_;
    }
    r.reduce();
    return r;
}

QRat QRat::operator-(const QRat& o) const { return *this + (-o); }

QRat QRat::operator-() const {
    QRat r = *this;
    r.num_ = -r.num_;
    return r;
}

QRat QRat::operator*(const QRat& o) const {
    if (is_zero() || o.is_zero()) return QRat();
    // cross-reduce before multiplying to keep the factors small
    QRat r;
    if (num_.deg() == 0 || o.den_.deg() == 0) {
        r.num_ = num_;
        r.den_ = o.den_;
    } else {
        QPoly g1 = gcd_primitive(num_, o.den_);
        r.num_ = g1.deg() > 0 ? num_.exact_div(g1) : num_;
        r.den_ = g1.deg() > 0 ? o.den_.exact_div(g1) : o.den_;
    }
    QPoly n2, d1;
    if (o.num_.deg() == 0 || den_.deg() == 0) {
        n2 = o.num_;
        d1 = den_;
    } else {
        QPoly g2 = gcd_primitive(o.num_, den_);
        n2 = g2.deg() > 0 ? o.num_.exact_div(g2) : o.num_;
        d1 = g2.deg() > 0 ? den_.exact_div(g2) : den_;
    }
    r.num_ = r.num_ * n2;
    r.den_ = r.den_ * d1;
    Rat l = r.den_.lc();
    if (l != 1) {
        r.den_.c_ /= l;
        r.num_.c_ /= l;
    }
    return r;
}

QRat QRat::inv() const {
    if (is_zero()) throw arith_error("division by zero rational function");
    QRat r;
    r.num_ = den_;
    r.den_ = num_;
    Rat l = r.den_.lc();
    if (l != 1) {
        r.den_.c_ /= l;
        r.num_.c_ /= l;
    }
    return r;
}

QRat QRat::operator/(const QRat& o) const { return *this * o.inv(); }

QRat QRat::compose_power(long m) const {
    if (m == 0) {
        Rat d = den_.eval(Rat(1));
        if (d == 0) throw arith_error("compose_power(0): pole at q=1");
        return QRat(Rat(num_.eval(Rat(1)) / d));
    }
    auto [n, sn] = num_.compose_power(m);
    auto [d, sd] = den_.compose_power(m);
    long s = sn - sd;
    if (s >= 0)
        return QRat(n.shifted(static_cast<int>(s)), d);
    return QRat(n, d.shifted(static_cast<int>(-s)));
}

Rat QRat::eval(const Rat& q0) const {
    Rat d = den_.eval(q0);
    if (d == 0) throw arith_error("pole at q0 = " + rat_str(q0));
    return num_.eval(q0) / d;
}

std::string QRat::str() const {
    if (den_.is_one()) return num_.str();
    std::string n = num_.str();
    if (num_.deg() > 0) n = "(" + n + ")";
    return n + "/(" + den_.str() + ")";
}

// ---------------------------------------------------------------------------
// HSeries

HSeries::HSeries(int lead, int prec, std::vector<Rat> coeffs)
    : lead_(lead), prec_(prec), c_(std::move(coeffs)) {
    if (lead_ + static_cast<int>(c_.size()) > prec_)
        c_.resize(static_cast<size_t>(prec_ - lead_ < 0 ? 0 : prec_ - lead_));
    normalize();
}

HSeries HSeries::from_rat(const Rat& c, int prec) { return HSeries(0, prec, {c}); }

void HSeries::normalize() {
    size_t i = 0;
    while (i < c_.size() && c_[i] == 0) ++i;
    if (i > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(i));
        lead_ += static_cast<int>(i);
    }
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
    if (c_.empty()) lead_ = prec_;
}

int HSeries::val() const { return c_.empty() ? prec_ : lead_; }

Rat HSeries::coeff(int e) const {
    if (e >= prec_) throw arith_error("HSeries: coefficient beyond recorded precision");
    if (e < lead_ || e >= lead_ + static_cast<int>(c_.size())) return Rat(0);
    return c_[static_cast<size_t>(e - lead_)];
}

HSeries HSeries::operator+(const HSeries& o) const {
    int p = std::min(prec_, o.prec_);
    int lo = std::min(val(), o.val());
    if (lo >= p) return HSeries(p);
    std::vector<Rat> c(static_cast<size_t>(p - lo), Rat(0));
    for (int e = lo; e < p; ++e) {
        Rat v(0);
        if (e >= lead_ && e < lead_ + static_cast<int>(c_.size())) v += c_[static_cast<size_t>(e - lead_)];
        if (e >= o.lead_ && e < o.lead_ + static_cast<int>(o.c_.size()))
            v += o.c_[static_cast<size_t>(e - o.lead_)];
        c[static_cast<size_t>(e - lo)] = v;
    }
    return HSeries(lo, p, std::move(c));
}

HSeries HSeries::operator-() const {
    HSeries r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

HSeries HSeries::operator-(const HSeries& o) const { return *this + (-o); }

HSeries HSeries::operator*(const HSeries& o) const {
    int p = std::min(prec_ + o.val(), o.prec_ + val());
    if (known_zero() || o.known_zero()) return HSeries(p);
    int lo = lead_ + o.lead_;
    if (lo >= p) return HSeries(p);
    std::vector<Rat> c(static_cast<size_t>(p - lo), Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            int e = lead_ + static_cast<int>(i) + o.lead_ + static_cast<int>(j);
            if (e >= p) break;
            c[static_cast<size_t>(e - lo)] += c_[i] * o.c_[j];
        }
    }
    return HSeries(lo, p, std::move(c));
}

HSeries HSeries::inv() const {
    if (known_zero()) throw arith_error("HSeries: inverse of (truncated) zero");
    int n = prec_ - lead_;
    std::vector<Rat> a(static_cast<size_t>(n), Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) a[i] = c_[i];
    std::vector<Rat> b(static_cast<size_t>(n), Rat(0));
    b[0] = Rat(1) / a[0];
    for (int k = 1; k < n; ++k) {
        Rat s(0);
        for (int j = 1; j <= k; ++j) s += a[static_cast<size_t>(j)] * b[static_cast<size_t>(k - j)];
        b[static_cast<size_t>(k)] = -s / a[0];
    }
    return HSeries(-lead_, -lead_ + n, std::move(b));
}

HSeries HSeries::scaled(const Rat& s) const {
    HSeries r = *this;
    for (auto& c : r.c_) c *= s;
    r.normalize();
    return r;
}

HSeries HSeries::truncated(int prec) const {
    HSeries r = *this;
    if (prec < r.prec_) {
        r.prec_ = prec;
        if (r.lead_ + static_cast<int>(r.c_.size()) > prec)
            r.c_.resize(static_cast<size_t>(std::max(0, prec - r.lead_)));
        r.normalize();
    }
    return r;
}

bool HSeries::matches(const HSeries& o) const {
    int p = std::min(prec_, o.prec_);
    int lo = std::min(val(), o.val());
    for (int e = lo; e < p; ++e)
        if (coeff(e) != o.coeff(e)) return false;
    return true;
}

std::string HSeries::str() const {
    std::ostringstream os;
    bool first = true;
    for (int e = val(); e < prec_; ++e) {
        Rat c = coeff(e);
        if (c == 0) continue;
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        Rat a = c < 0 ? Rat(-c) : c;
        if (e == 0) {
            os << rat_str(a);
        } else {
            if (a != 1) os << rat_str(a) << "*";
            os << "h";
            if (e != 1) os << "^" << e;
        }
        first = false;
    }
    if (first) os << "0";
    os << " + O(h^" << prec_ << ")";
    return os.str();
}

HSeries exp_series(long k, int prec) {
    if (prec <= 0) return HSeries(prec);
    std::vector<Rat> c(static_cast<size_t>(prec));
    Rat term(1);
    c[0] = term;
    for (int j = 1; j < prec; ++j) {
        term = term * Rat(k) / Rat(j);
        c[static_cast<size_t>(j)] = term;
    }
    return HSeries(0, prec, std::move(c));
}

namespace {

// p(e^h) to the requested number of terms
HSeries poly_exp_series(const QPoly& p, int prec) {
    if (p.is_zero()) return HSeries(prec);
    std::vector<Rat> c(static_cast<size_t>(prec), Rat(0));
    for (int k = 0; k <= p.deg(); ++k) {
        Rat pk = p.coeff(k);
        if (pk == 0) continue;
        Rat term = pk;
        c[0] += term;
        for (int j = 1; j < prec; ++j) {
            term = term * Rat(k) / Rat(j);
            c[static_cast<size_t>(j)] += term;
        }
    }
    return HSeries(0, prec, std::move(c));
}

}  // namespace

HSeries h_expand(const QRat& a, int prec) {
    if (prec < 1) throw arith_error("h_expand: precision must be >= 1");
    if (a.is_zero()) return HSeries(prec);
    // the vanishing order of p(e^h) at h=0 is at most deg p, so deg+1 terms
    // always locate the valuation
    int dn = std::max(a.num().deg(), 0), dd = std::max(a.den().deg(), 0);
    int work = prec + dn + dd + 2;
    HSeries n = poly_exp_series(a.num(), work);
    HSeries d = poly_exp_series(a.den(), work);
    if (n.known_zero() || d.known_zero())
        throw arith_error("h_expand: internal expansion capacity exceeded");
    return (n * d.inv()).truncated(prec);
}

}  // namespace qlax
