#include "qcov/ratfunc.hpp"

#include "qcov/errors.hpp"

namespace qcov {

RatFunc::RatFunc(const Rat& v)
    : num_(Int(boost::multiprecision::numerator(v))),
      den_(Int(boost::multiprecision::denominator(v))) {
    canon();
}

RatFunc::RatFunc(ZPoly num, ZPoly den) : num_(std::move(num)), den_(std::move(den)) {
    check(!den_.zero(), "RatFunc with zero denominator");
    canon();
}

void RatFunc::canon() {
    if (num_.zero()) {
        den_ = ZPoly(1);
        return;
    }
    ZPoly g = polyGcd(num_, den_);
    if (g.deg() > 0) {
        num_ = num_.divExact(g);
        den_ = den_.divExact(g);
    }
    Int cn = num_.content(), cd = den_.content();
    Int ci = boost::multiprecision::gcd(cn, cd);
    if (ci > 1) {
        num_ = num_.divExact(ZPoly(ci));
        den_ = den_.divExact(ZPoly(ci));
    }
    if (den_.lead() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

RatFunc RatFunc::qpow(long k) {
    if (k >= 0) return RatFunc(ZPoly::q(static_cast<int>(k)));
    return RatFunc(ZPoly(1), ZPoly::q(static_cast<int>(-k)));
}

RatFunc RatFunc::operator-() const {
    RatFunc r(*this);
    r.num_ = -r.num_;
    return r;
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.zero()) return b;
    if (b.zero()) return a;
    ZPoly g = polyGcd(a.den_, b.den_);
    ZPoly da = a.den_.divExact(g), db = b.den_.divExact(g);
    return RatFunc(a.num_ * db + b.num_ * da, da * b.den_);
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.zero() || b.zero()) return RatFunc();
    // cross-cancel before multiplying to keep degrees down
    ZPoly g1 = polyGcd(a.num_, b.den_);
    ZPoly g2 = polyGcd(b.num_, a.den_);
    return RatFunc(a.num_.divExact(g1) * b.num_.divExact(g2),
                   a.den_.divExact(g2) * b.den_.divExact(g1));
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.zero()) throw DivisionByZeroDivisor("RatFunc division by zero");
    return a * RatFunc(b.den_, b.num_);
}

long RatFunc::val0() const {
    if (zero()) return VAL_INF;
    return static_cast<long>(num_.low()) - static_cast<long>(den_.low());
}

Rat RatFunc::eval0() const {
    if (zero()) return Rat(0);
    long v = val0();
    if (v < 0) throw NotRegularAtZero(str());
    if (v > 0) return Rat(0);
    int ln = num_.low(), ld = den_.low();
    return Rat(num_.coeff(ln)) / Rat(den_.coeff(ld));
}

Rat RatFunc::evalAt(const Rat& x) const {
    Rat d = den_.evalRat(x);
    check(d != 0, "RatFunc::evalAt hit a pole");
    return num_.evalRat(x) / d;
}

RatFunc RatFunc::substQInv() const {
    if (zero()) return RatFunc();
    // num(1/q)/den(1/q) = q^(deg den - deg num) * rev(num)/rev(den)
    int dn = num_.deg(), dd = den_.deg();
    ZPoly n = num_.reversed(), d = den_.reversed();
    if (dd >= dn)
        return RatFunc(n.mulMonomial(Int(1), dd - dn), d);
    return RatFunc(n, d.mulMonomial(Int(1), dn - dd));
}

RatFunc RatFunc::substNegQ() const {
    if (zero()) return RatFunc();
    return RatFunc(num_.substNegQ(), den_.substNegQ());
}

RatFunc RatFunc::substNegQInv() const { return substQInv().substNegQ(); }

RatFunc RatFunc::substPow(int d) const {
    if (zero()) return RatFunc();
    return RatFunc(num_.substPow(d), den_.substPow(d));
}

std::string RatFunc::str() const {
    if (isPolynomial()) {
        if (den_.lead() == 1) return num_.str();
        return "(" + num_.str() + ")/" + den_.lead().str();
    }
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

} // namespace qcov
