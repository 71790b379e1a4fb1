#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace qcov {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Dense polynomial in q with arbitrary-precision integer coefficients,
/// stored lowest degree first. The zero polynomial has an empty
/// coefficient vector and degree() == -1.
class ZPoly {
public:
    ZPoly() = default;
    ZPoly(long v);
    explicit ZPoly(Int v);
    explicit ZPoly(std::vector<Int> coeffs);

    static ZPoly monomial(Int c, int k);
    static ZPoly q(int k = 1);  // q^k, k >= 0

    bool zero() const { return c_.empty(); }
    int deg() const { return static_cast<int>(c_.size()) - 1; }
    int low() const;  // order of vanishing at q=0; -1 for the zero polynomial
    const Int& coeff(int k) const;
    Int lead() const;
    Int at0() const { return zero() ? Int(0) : c_.front(); }

    ZPoly operator-() const;
    friend ZPoly operator+(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator-(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator*(const ZPoly& a, const ZPoly& b);
    friend bool operator==(const ZPoly& a, const ZPoly& b) { return a.c_ == b.c_; }

    ZPoly mulMonomial(const Int& c, int k) const;

    Int content() const;            // gcd of coefficients, 0 for zero poly
    ZPoly primitive() const;        // content divided out, leading coeff sign kept
    ZPoly divExact(const ZPoly& b) const;  // throws if division is inexact
    bool divides(const ZPoly& b) const;    // this | b ?

    Rat evalRat(const Rat& x) const;

    ZPoly reversed() const;          // q^deg * p(1/q)
    ZPoly substNegQ() const;         // p(-q)
    ZPoly substPow(int d) const;     // p(q^d), d >= 1

    std::string str() const;         // "2*q^3 - q + 5", descending powers

private:
    std::vector<Int> c_;
    void trim();
};

ZPoly polyGcd(const ZPoly& a, const ZPoly& b);

} // namespace qcov
