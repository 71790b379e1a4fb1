#include "qcov/scalar.hpp"

#include "qcov/errors.hpp"

#include <cctype>

namespace qcov {

Scalar Scalar::qpi(long k, long e) {
    RatFunc qk = RatFunc::qpow(k);
    bool odd = (e % 2 + 2) % 2 == 1;
    return {qk, odd ? -qk : qk};
}

Scalar Scalar::fromEvenOdd(const RatFunc& a, const RatFunc& b) {
    return {a + b, a - b};
}

RatFunc Scalar::even() const { return (plus + minus) / RatFunc(2); }
RatFunc Scalar::odd() const { return (plus - minus) / RatFunc(2); }

Scalar operator/(const Scalar& a, const Scalar& b) {
    if (!b.invertible()) throw DivisionByZeroDivisor(b.str());
    return {a.plus / b.plus, a.minus / b.minus};
}

long Scalar::val0() const {
    return std::min(plus.val0(), minus.val0());
}

std::pair<Rat, Rat> Scalar::evalQ0() const {
    return {plus.eval0(), minus.eval0()};
}

Scalar Scalar::pow(int n) const {
    Scalar base = *this;
    if (n < 0) {
        base = Scalar(1) / base;
        n = -n;
    }
    Scalar acc(1);
    for (int k = 0; k < n; ++k) acc *= base;
    return acc;
}

// [n] = ((pi q)^n - q^-n) / (pi q - q^-1), evaluated per component.
// For n > 0 this is the Laurent sum over j < n of pi^j q^(2j-n+1);
// [0] = 0 and [-n] = -pi^n [n].
Scalar qpiInteger(int n, int d, int parity) {
    if (parity < 0) parity = d & 1;
    if (n == 0) return Scalar(0);
    bool neg = n < 0;
    int m = neg ? -n : n;
    ZPoly sumP, sumM;  // times q^(d*(m-1)) to stay polynomial
    for (int j = 0; j < m; ++j) {
        int k = d * (2 * j);  // exponent 2j-m+1 shifted by m-1
        sumP = sumP + ZPoly::q(k);
        bool oddPi = parity == 1 && (j & 1);
        sumM = sumM + (oddPi ? -ZPoly::q(k) : ZPoly::q(k));
    }
    ZPoly shift = ZPoly::q(d * (m - 1));
    Scalar r(RatFunc(sumP, shift), RatFunc(sumM, shift));
    if (neg) {
        r = -r;
        if (parity == 1 && (m & 1)) r = Scalar::pi() * r;
    }
    return r;
}

Scalar qpiFactorial(int n, int d, int parity) {
    check(n >= 0, "factorial of negative integer");
    Scalar acc(1);
    for (int i = 1; i <= n; ++i) acc *= qpiInteger(i, d, parity);
    return acc;
}

Scalar qpiBinomial(int n, int a, int d, int parity) {
    check(a >= 0, "binomial lower index must be nonnegative");
    Scalar acc(1);
    for (int i = 1; i <= a; ++i) acc *= qpiInteger(n + i - a, d, parity);
    return acc / qpiFactorial(a, d, parity);
}

// ---- rendering ----

static bool polyIsComposite(const ZPoly& p) {
    // more than one term, or a single negative term
    int terms = 0;
    for (int k = 0; k <= p.deg(); ++k)
        if (p.coeff(k) != 0) ++terms;
    return terms > 1 || p.lead() < 0;
}

static std::string rfFactorStr(const RatFunc& f) {
    // rendering suitable as a left factor of "*pi"
    if (f.isPolynomial() && f.den().lead() == 1 && !polyIsComposite(f.num()))
        return f.num().str();
    return "(" + f.str() + ")";
}

std::string Scalar::str() const {
    RatFunc a = even(), b = odd();
    if (a.zero() && b.zero()) return "0";
    if (b.zero()) return a.str();
    std::string bs = rfFactorStr(b) + "*pi";
    if (a.zero()) return bs;
    return a.str() + " + " + bs;
}

// ---- parsing ----
// Grammar (standard precedence, ^ binds tightest):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' int)?
//   atom   := integer | 'q' | 'pi' | '(' expr ')'
namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    explicit Parser(const std::string& text) : s(text) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
        skipWs();
        return pos < s.size() && s[pos] == c;
    }
    bool eat(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    long parseInt() {
        skipWs();
        bool neg = eat('-');
        skipWs();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer in '" + s + "'");
        long v = std::stol(s.substr(start, pos - start));
        return neg ? -v : v;
    }

    Scalar parseExpr() {
        Scalar acc = parseTerm();
        for (;;) {
            if (eat('+'))
                acc += parseTerm();
            else if (eat('-'))
                acc -= parseTerm();
            else
                return acc;
        }
    }

    Scalar parseTerm() {
        Scalar acc = parseFactor();
        for (;;) {
            if (eat('*'))
                acc *= parseFactor();
            else if (eat('/'))
                acc = acc / parseFactor();
            else
                return acc;
        }
    }

    Scalar parseFactor() {
        skipWs();
        if (eat('-')) return -parseFactor();
        Scalar base = parseAtom();
        if (eat('^')) {
            long e = parseInt();
            base = base.pow(static_cast<int>(e));
        }
        return base;
    }

    Scalar parseAtom() {
        skipWs();
        if (pos >= s.size()) throw ParseError("unexpected end of '" + s + "'");
        if (eat('(')) {
            Scalar inner = parseExpr();
            if (!eat(')')) throw ParseError("missing ')' in '" + s + "'");
            return inner;
        }
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) return Scalar(parseInt());
        if (c == 'q') {
            ++pos;
            return Scalar::q();
        }
        if (c == 'p' && pos + 1 < s.size() && s[pos + 1] == 'i') {
            pos += 2;
            return Scalar::pi();
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' in '" + s + "'");
    }
};

} // namespace

Scalar Scalar::parse(const std::string& text) {
    Parser p(text);
    Scalar r = p.parseExpr();
    p.skipWs();
    if (p.pos != text.size()) throw ParseError("trailing input in '" + text + "'");
    return r;
}

} // namespace qcov
