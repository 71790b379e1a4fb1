#pragma once

#include "qcov/polynomial.hpp"

#include <climits>
#include <string>

namespace qcov {

/// Rational function in q over the rationals, stored as a pair of coprime
/// integer-coefficient polynomials. Canonical form: poly gcd of numerator and
/// denominator is constant, integer contents are coprime, and the denominator
/// has positive leading coefficient. Equal values have identical
/// representations, so equality is a plain comparison.
class RatFunc {
public:
    static constexpr long VAL_INF = LONG_MAX;  // valuation of 0

    RatFunc() : num_(), den_(1) {}
    RatFunc(long v) : num_(v), den_(1) {}
    explicit RatFunc(Int v) : num_(std::move(v)), den_(1) {}
    explicit RatFunc(const Rat& v);
    explicit RatFunc(ZPoly p) : num_(std::move(p)), den_(1) {}
    RatFunc(ZPoly num, ZPoly den);

    static RatFunc qpow(long k);  // q^k for any integer k

    bool zero() const { return num_.zero(); }
    const ZPoly& num() const { return num_; }
    const ZPoly& den() const { return den_; }
    bool isPolynomial() const { return den_.deg() == 0; }

    RatFunc operator-() const;
    friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b);  // b != 0
    RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
    RatFunc& operator-=(const RatFunc& b) { return *this = *this - b; }
    RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }
    RatFunc& operator/=(const RatFunc& b) { return *this = *this / b; }
    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    long val0() const;        // order of vanishing at q=0 (VAL_INF for 0)
    bool regular0() const { return zero() || val0() >= 0; }
    Rat eval0() const;        // throws NotRegularAtZero
    Rat evalAt(const Rat& x) const;  // exact evaluation, x not a pole

    RatFunc substQInv() const;     // q -> 1/q
    RatFunc substNegQInv() const;  // q -> -1/q
    RatFunc substNegQ() const;     // q -> -q
    RatFunc substPow(int d) const; // q -> q^d

    std::string str() const;

private:
    ZPoly num_, den_;
    void canon();
};

} // namespace qcov
