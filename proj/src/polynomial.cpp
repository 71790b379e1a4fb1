#include "qcov/polynomial.hpp"

#include "qcov/errors.hpp"

#include <algorithm>

namespace qcov {

ZPoly::ZPoly(long v) {
    if (v != 0) c_.push_back(Int(v));
}

ZPoly::ZPoly(Int v) {
    if (v != 0) c_.push_back(std::move(v));
}

ZPoly::ZPoly(std::vector<Int> coeffs) : c_(std::move(coeffs)) { trim(); }

ZPoly ZPoly::monomial(Int c, int k) {
    ZPoly p;
    if (c == 0) return p;
    p.c_.assign(static_cast<size_t>(k) + 1, Int(0));
    p.c_.back() = std::move(c);
    return p;
}

ZPoly ZPoly::q(int k) { return monomial(Int(1), k); }

void ZPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

int ZPoly::low() const {
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) return static_cast<int>(i);
    return -1;
}

const Int& ZPoly::coeff(int k) const {
    static const Int zero(0);
    if (k < 0 || k >= static_cast<int>(c_.size())) return zero;
    return c_[static_cast<size_t>(k)];
}

Int ZPoly::lead() const { return zero() ? Int(0) : c_.back(); }

ZPoly ZPoly::operator-() const {
    ZPoly r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
}

ZPoly operator+(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), Int(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r.c_[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r.c_[i] += b.c_[i];
    r.trim();
    return r;
}

ZPoly operator-(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), Int(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r.c_[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r.c_[i] -= b.c_[i];
    r.trim();
    return r;
}

ZPoly operator*(const ZPoly& a, const ZPoly& b) {
    ZPoly r;
    if (a.zero() || b.zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, Int(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < b.c_.size(); ++j)
            if (b.c_[j] != 0) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    r.trim();
    return r;
}

ZPoly ZPoly::mulMonomial(const Int& c, int k) const {
    ZPoly r;
    if (c == 0 || zero()) return r;
    r.c_.assign(c_.size() + static_cast<size_t>(k), Int(0));
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i + static_cast<size_t>(k)] = c_[i] * c;
    r.trim();
    return r;
}

Int ZPoly::content() const {
    Int g(0);
    for (const auto& x : c_) g = boost::multiprecision::gcd(g, x);
    return g;
}

ZPoly ZPoly::primitive() const {
    if (zero()) return ZPoly();
    Int g = content();
    ZPoly r(*this);
    for (auto& x : r.c_) x /= g;
    return r;
}

// Exact division; remainder must come out zero.
ZPoly ZPoly::divExact(const ZPoly& b) const {
    check(!b.zero(), "ZPoly::divExact by zero");
    if (zero()) return ZPoly();
    ZPoly rem(*this);
    std::vector<Int> qc;
    int db = b.deg();
    if (rem.deg() < db) throw InternalCheck("ZPoly::divExact inexact (degree)");
    qc.assign(static_cast<size_t>(rem.deg() - db) + 1, Int(0));
    while (!rem.zero() && rem.deg() >= db) {
        Int c = rem.lead() / b.lead();
        if (c * b.lead() != rem.lead())
            throw InternalCheck("ZPoly::divExact inexact (leading coefficient)");
        int k = rem.deg() - db;
        qc[static_cast<size_t>(k)] = c;
        rem = rem - b.mulMonomial(c, k);
    }
    if (!rem.zero()) throw InternalCheck("ZPoly::divExact inexact (remainder)");
    return ZPoly(std::move(qc));
}

bool ZPoly::divides(const ZPoly& b) const {
    if (zero()) return b.zero();
    if (b.zero()) return true;
    if (b.deg() < deg()) return false;
    ZPoly rem(b);
    int da = deg();
    while (!rem.zero() && rem.deg() >= da) {
        Int c = rem.lead() / lead();
        if (c * lead() != rem.lead()) return false;
        rem = rem - mulMonomial(c, rem.deg() - da);
    }
    return rem.zero();
}

Rat ZPoly::evalRat(const Rat& x) const {
    Rat acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + Rat(c_[i]);
    return acc;
}

ZPoly ZPoly::reversed() const {
    ZPoly r(*this);
    std::reverse(r.c_.begin(), r.c_.end());
    r.trim();
    return r;
}

ZPoly ZPoly::substNegQ() const {
    ZPoly r(*this);
    for (size_t i = 1; i < r.c_.size(); i += 2) r.c_[i] = -r.c_[i];
    return r;
}

ZPoly ZPoly::substPow(int d) const {
    check(d >= 1, "ZPoly::substPow needs d >= 1");
    if (zero() || d == 1) return *this;
    ZPoly r;
    r.c_.assign(c_.size() * static_cast<size_t>(d), Int(0));
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i * static_cast<size_t>(d)] = c_[i];
    r.trim();
    return r;
}

// Pseudo-remainder of a by b (both nonzero, deg a >= deg b).
static ZPoly pseudoRem(ZPoly a, const ZPoly& b) {
    int db = b.deg();
    Int lb = b.lead();
    while (!a.zero() && a.deg() >= db) {
        int k = a.deg() - db;
        Int la = a.lead();
        // multiply a through by lb so the leading terms cancel exactly
        ZPoly scaled;
        {
            std::vector<Int> cs;
            cs.reserve(static_cast<size_t>(a.deg()) + 1);
            for (int i = 0; i <= a.deg(); ++i) cs.push_back(a.coeff(i) * lb);
            scaled = ZPoly(std::move(cs));
        }
        a = scaled - b.mulMonomial(la, k);
    }
    return a;
}

ZPoly polyGcd(const ZPoly& a0, const ZPoly& b0) {
    ZPoly a = a0.primitive(), b = b0.primitive();
    if (a.zero()) return b.lead() < 0 ? -b : b;
    if (b.zero()) return a.lead() < 0 ? -a : a;
    if (a.deg() < b.deg()) std::swap(a, b);
    while (!b.zero()) {
        ZPoly r = pseudoRem(a, b).primitive();
        a = b;
        b = r;
    }
    if (a.lead() < 0) a = -a;
    return a;
}

std::string ZPoly::str() const {
    if (zero()) return "0";
    std::string out;
    bool first = true;
    for (int k = deg(); k >= 0; --k) {
        const Int& ck = coeff(k);
        if (ck == 0) continue;
        Int mag = ck < 0 ? Int(-ck) : ck;
        if (first) {
            if (ck < 0) out += "-";
            first = false;
        } else {
            out += ck < 0 ? " - " : " + ";
        }
        bool needCoeff = (mag != 1) || (k == 0);
        if (needCoeff) out += mag.str();
        if (k > 0) {
            if (needCoeff) out += "*";
            out += "q";
            if (k > 1) out += "^" + std::to_string(k);
        }
    }
    return out;
}

} // namespace qcov
