#pragma once

#include "qcov/ratfunc.hpp"

#include <optional>
#include <string>
#include <utility>

namespace qcov {

/// Element of Q(q)[pi]/(pi^2-1), stored as the pair of its specializations at
/// pi = +1 (plus) and pi = -1 (minus). Ring operations act componentwise; the
/// even/odd decomposition a + b*pi is recovered as a = (plus+minus)/2,
/// b = (plus-minus)/2. The bar involution q -> pi/q acts as q -> 1/q on the
/// plus component and q -> -1/q on the minus component.
struct Scalar {
    RatFunc plus, minus;

    Scalar() = default;
    Scalar(long v) : plus(v), minus(v) {}
    explicit Scalar(const RatFunc& both) : plus(both), minus(both) {}
    Scalar(RatFunc p, RatFunc m) : plus(std::move(p)), minus(std::move(m)) {}

    static Scalar pi() { return Scalar(RatFunc(1), RatFunc(-1)); }
    static Scalar q(long k = 1) { return Scalar(RatFunc::qpow(k)); }
    /// q^k * pi^e
    static Scalar qpi(long k, long e);
    static Scalar fromEvenOdd(const RatFunc& a, const RatFunc& b);

    RatFunc even() const;
    RatFunc odd() const;

    bool isZero() const { return plus.zero() && minus.zero(); }
    bool isZeroDivisor() const { return plus.zero() != minus.zero(); }
    bool invertible() const { return !plus.zero() && !minus.zero(); }

    Scalar operator-() const { return {-plus, -minus}; }
    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        return {a.plus + b.plus, a.minus + b.minus};
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        return {a.plus - b.plus, a.minus - b.minus};
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return {a.plus * b.plus, a.minus * b.minus};
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b);
    Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
    Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
    Scalar& operator*=(const Scalar& b) { return *this = *this * b; }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.plus == b.plus && a.minus == b.minus;
    }

    Scalar bar() const { return {plus.substQInv(), minus.substNegQInv()}; }

    /// Order of vanishing at q=0, the minimum over the two components.
    long val0() const;
    bool regular0() const { return plus.regular0() && minus.regular0(); }
    /// Value in Q^pi at q=0 as (plus(0), minus(0)); throws NotRegularAtZero.
    std::pair<Rat, Rat> evalQ0() const;

    Scalar pow(int n) const;  // n >= 0, or invertible for n < 0

    std::string str() const;
    static Scalar parse(const std::string& text);
};

/// The (q,pi)-integer [n] with q_i = q^d and pi_i = pi^parity.
/// parity defaults to d mod 2, which is the bar-consistent choice.
Scalar qpiInteger(int n, int d, int parity = -1);
Scalar qpiFactorial(int n, int d, int parity = -1);
/// prod_{i=1..a} [n+i-a] / [a]!  (n may be negative, a >= 0)
Scalar qpiBinomial(int n, int a, int d, int parity = -1);

/// Order of vanishing at q=0 of a Scalar; +infinity is RatFunc::VAL_INF.
/// For non-zero-divisors valuation is additive under multiplication.
struct QOrder {
    long valuation = RatFunc::VAL_INF;
    QOrder() = default;
    explicit QOrder(const Scalar& s) : valuation(s.val0()) {}
    bool finite() const { return valuation != RatFunc::VAL_INF; }
    friend bool operator==(const QOrder& a, const QOrder& b) = default;
};

} // namespace qcov
