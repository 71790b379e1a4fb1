#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcov/errors.hpp"
#include "qcov/half_algebra.hpp"

#include "test_util.hpp"

using namespace qcov;
using testutil::Rng;

static HalfAlgebra& osp12() {
    static HalfAlgebra h(*catalogDatum("osp12"), 10);
    return h;
}

static HalfAlgebra& osp14() {
    static HalfAlgebra h(*catalogDatum("osp14"), 7);
    return h;
}

// random homogeneous element with words of the given weight
static HalfElement randElement(HalfAlgebra& h, const RootVec& zeta, Rng& g) {
    FreeElt acc;
    for (const Word& w : h.wordsOfWeight(zeta)) {
        Scalar c(g.intIn(-3, 3));
        if (g.intIn(0, 2) == 0) c = c * Scalar::q(g.intIn(-2, 2));
        if (g.intIn(0, 3) == 0) c = c * Scalar::pi();
        feAdd(acc, w, c);
    }
    HalfElement e = h.make(std::move(acc));
    e.weight = zeta;
    e.parity = h.datum().parityOf(zeta);
    return e;
}

TEST_CASE("e_prime and e_dprime on small words") {
    auto& h = osp12();
    HalfElement f1 = h.f(0);
    HalfElement f1f1 = h.multiply(f1, f1);

    CHECK(h.ePrime(0, f1).terms == h.one().terms);
    // E'(F^2) = (1 + pi q^-2) F
    Scalar c = Scalar(1) + Scalar::pi() * Scalar::q(-2);
    CHECK(h.ePrime(0, f1f1).terms == feScale(c, f1.terms));
    // E''(F^2) = (1 + pi q^2) F
    Scalar c2 = Scalar(1) + Scalar::pi() * Scalar::q(2);
    CHECK(h.eDoublePrime(0, f1f1).terms == feScale(c2, f1.terms));
    CHECK(h.eDoublePrime(0, h.one()).isZero());

    auto& h2 = osp14();
    // E_1'(F_2) = 0 in rank 2
    CHECK(h2.ePrime(0, h2.f(1)).isZero());
}

TEST_CASE("polarization base values") {
    auto& h = osp14();
    CHECK(h.polarization(h.one(), h.one()) == Scalar(1));
    CHECK(h.polarization(h.f(0), h.f(0)) == Scalar(1));
    CHECK(h.polarization(h.f(1), h.f(1)) == Scalar(1));
    CHECK(h.polarization(h.f(0), h.f(1)).isZero());
}

TEST_CASE("polarization values of the quantum osp(1|4) height-5 pair") {
    auto& h = osp14();
    // G1 = F_1^(4) F_2,  G2 = F_1^(3) (F_2 F_1 - q^2 F_1 F_2)
    HalfElement g1 = h.dividedPowerMonomial({{0, 4}, {1, 1}});
    HalfElement f3 = h.dividedPowerMonomial({{0, 3}});
    HalfElement inner = h.make(feSub(h.multiply(h.f(1), h.f(0)).terms,
                                     feScale(Scalar::q(2), h.multiply(h.f(0), h.f(1)).terms)));
    HalfElement g2 = h.multiply(f3, inner);

    // self-pairings: (pi q)^-6 ([4]!)^-1 and (pi q)^-3 ([3]!)^-1 (1-q^4);
    // the negative exponents are forced by the q=0 residues 1 and pi below
    Scalar piq = Scalar::pi() * Scalar::q();
    Scalar v11 = piq.pow(-6) / qpiFactorial(4, 1);
    Scalar v22 = piq.pow(-3) / qpiFactorial(3, 1) * (Scalar(1) - Scalar::q(4));

    CHECK(h.polarization(g1, g2).isZero());
    CHECK(h.polarization(g1, g1) == v11);
    CHECK(h.polarization(g2, g2) == v22);

    // q=0 residues: 1, pi, 0
    auto r11 = h.polarization(g1, g1).evalQ0();
    CHECK(r11.first == Rat(1));
    CHECK(r11.second == Rat(1));
    auto r22 = h.polarization(g2, g2).evalQ0();
    CHECK(r22.first == Rat(1));
    CHECK(r22.second == Rat(-1));
}

TEST_CASE("weight space bases") {
    auto& h12 = osp12();
    RootVec a1 = -RootVec::alpha(1, 0);
    const auto& s1 = h12.space(a1);
    CHECK(s1.dim() == 1);
    CHECK(s1.gram.at(0, 0) == Scalar(1));

    // -2 alpha_1: basis {F^2}, gram value 1 + pi q^-2 = [2]! (pi q)^-1
    RootVec a2 = a1 + a1;
    const auto& s2 = h12.space(a2);
    CHECK(s2.dim() == 1);
    Scalar expect = Scalar(1) + Scalar::pi() * Scalar::q(-2);
    CHECK(s2.gram.at(0, 0) == expect);
    CHECK(expect == qpiFactorial(2, 1) / (Scalar::pi() * Scalar::q()));

    // osp(1|4), -(alpha_1+alpha_2): two words, rank 2
    auto& h14 = osp14();
    RootVec z(std::vector<int>{-1, -1});
    const auto& s3 = h14.space(z);
    CHECK(s3.words.size() == 2);
    CHECK(s3.dim() == 2);

    CHECK_THROWS_AS(h14.space(RootVec(std::vector<int>{-9, -9})), CutoffExceeded);
}

TEST_CASE("multiply and divided powers") {
    auto& h = osp12();
    Rng g(21);
    RootVec z(std::vector<int>{-3});
    HalfElement y = randElement(h, z, g);
    CHECK(h.multiply(h.one(), y).terms == y.terms);
    // F * F = [2] F^(2)
    HalfElement ff = h.multiply(h.f(0), h.f(0));
    HalfElement dp2 = h.dividedPowerMonomial({{0, 2}});
    CHECK(ff.terms == feScale(qpiInteger(2, 1), dp2.terms));
    CHECK(h.dividedPowerMonomial({{0, 0}}).terms == h.one().terms);

    // Serre combinations reduce to zero in the quotient
    auto& h14 = osp14();
    HalfElement s01 = h14.serreElement(0, 1);
    CHECK(h14.isZeroInQuotient(s01));
    HalfElement s10 = h14.serreElement(1, 0);
    CHECK(h14.isZeroInQuotient(s10));
    // and pair to zero against every word of matching weight
    for (const Word& w : h14.wordsOfWeight(s01.weight)) {
        FreeElt e;
        e.emplace(w, Scalar(1));
        CHECK(h14.polarization(s01, h14.make(e)).isZero());
    }

    HalfElement dpm = h14.dividedPowerMonomial({{0, 4}, {1, 1}});
    CHECK(dpm.weight == RootVec(std::vector<int>{-4, -1}));
    CHECK(!h14.isZeroInQuotient(dpm));
}

TEST_CASE("polarization symmetry and weight orthogonality (random)") {
    auto& h = osp14();
    Rng g(22);
    std::vector<RootVec> weights = {RootVec(std::vector<int>{-2, -1}),
                                    RootVec(std::vector<int>{-1, -2}),
                                    RootVec(std::vector<int>{-3, -1})};
    for (const auto& z : weights) {
        HalfElement x = randElement(h, z, g);
        HalfElement y = randElement(h, z, g);
        CHECK(h.polarization(x, y) == h.polarization(y, x));
    }
    HalfElement a = randElement(h, weights[0], g);
    HalfElement b = randElement(h, weights[1], g);
    CHECK(h.polarization(a, b).isZero());
}

TEST_CASE("q-commutation of E_i' and E_j''") {
    auto& h = osp14();
    const auto& cd = h.datum();
    std::vector<RootVec> weights = {RootVec(std::vector<int>{-2, -1}),
                                    RootVec(std::vector<int>{-2, -2}),
                                    RootVec(std::vector<int>{-3, -1})};
    for (const auto& z : weights) {
        const auto& ws = h.space(z);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Scalar coef = ((cd.p(i) * cd.p(j)) & 1) ? Scalar::pi() : Scalar(1);
                coef = coef * cd.qi(j, cd.a(j, i));
                for (size_t k = 0; k < ws.dim(); ++k) {
                    FreeElt w;
                    w.emplace(ws.basisWord(k), Scalar(1));
                    HalfElement x = h.make(w);
                    HalfElement lhs = h.ePrime(i, h.eDoublePrime(j, x));
                    HalfElement rhs =
                        h.make(feScale(coef, h.eDoublePrime(j, h.ePrime(i, x)).terms));
                    rhs.weight = lhs.weight;
                    CHECK(h.equalInQuotient(lhs, rhs));
                }
            }
    }
}

TEST_CASE("kernel triviality away from weight zero") {
    auto& h = osp14();
    std::vector<RootVec> weights = {RootVec(std::vector<int>{-1, 0}),
                                    RootVec(std::vector<int>{-1, -1}),
                                    RootVec(std::vector<int>{-2, -1}),
                                    RootVec(std::vector<int>{-2, -2})};
    for (const auto& z : weights) {
        const auto& ws = h.space(z);
        if (ws.dim() == 0) continue;
        RFMat stackP, stackM;
        for (int i = 0; i < 2; ++i) {
            PairMat e = h.ePrimeMatrix(z, i);
            for (size_t r = 0; r < e.rows(); ++r) {
                stackP.push_back(e.plus[r]);
                stackM.push_back(e.minus[r]);
            }
        }
        REQUIRE(!stackP.empty());
        CHECK(rfNullspace(stackP).empty());
        CHECK(rfNullspace(stackM).empty());
    }
}

TEST_CASE("Serre operator q-commutes with multiplication operators") {
    auto& h = osp14();
    const auto& cd = h.datum();
    const int i = 0, j = 1;
    const int b = 1 - cd.a(i, j);
    auto serreOp = [&](const HalfElement& x) {
        FreeElt sum;
        for (int t = 0; t <= b; ++t) {
            HalfElement cur = x;
            for (int s = 0; s < t; ++s) cur = h.ePrime(i, cur);
            cur = h.ePrime(j, cur);
            for (int s = 0; s < b - t; ++s) cur = h.ePrime(i, cur);
            Scalar c = cd.qbinom(i, b, t) * cd.piPow(i, (t * (t - 1)) / 2 + t * cd.p(j));
            if (t & 1) c = -c;
            sum = feAdd(sum, feScale(c, cur.terms));
        }
        return sum;
    };
    RootVec z(std::vector<int>{-3, -1});
    RootVec raise(std::vector<int>{b, 1});
    Rng g(30);
    for (int k = 0; k < 2; ++k) {
        HalfElement x = randElement(h, z, g);
        FreeElt lhs = serreOp(h.multiply(h.f(k), x));
        Scalar coef =
            cd.piPow(k, b * cd.p(i) + cd.p(j)) * cd.qi(k, -(b * cd.a(k, i) + cd.a(k, j)));
        FreeElt rhs;
        for (const auto& [w, c] : serreOp(x)) {
            Word pre;
            pre.push_back(k);
            pre.insert(pre.end(), w.begin(), w.end());
            feAdd(rhs, pre, coef * c);
        }
        RootVec at = z - RootVec::alpha(2, k) + raise;
        CHECK(svIsZero(svSub(h.reduceAt(lhs, at), h.reduceAt(rhs, at))));
    }
}

TEST_CASE("kernel-image decomposition of weight spaces") {
    auto& h = osp14();
    for (const auto& z : {RootVec(std::vector<int>{-2, -1}), RootVec(std::vector<int>{-2, -2}),
                          RootVec(std::vector<int>{-3, -1})}) {
        const auto& ws = h.space(z);
        for (int i = 0; i < 2; ++i) {
            PairMat e = h.ePrimeMatrix(z, i);
            size_t kerDim;
            if (e.rows() == 0) {
                kerDim = ws.dim();
            } else {
                auto np = rfNullspace(e.plus), nm = rfNullspace(e.minus);
                CHECK(np.size() == nm.size());
                kerDim = np.size();
            }
            RootVec up = z + RootVec::alpha(2, i);
            bool upValid = true;
            for (int c : up.coords) upValid = upValid && c <= 0;
            size_t imDim = 0;
            if (upValid && h.space(up).dim() > 0) imDim = h.fMatrix(up, i).rank();
            CHECK(kerDim + imDim == ws.dim());
        }
    }
}

TEST_CASE("boson projector") {
    auto& h = osp14();
    HalfElement inner = h.make(feSub(h.multiply(h.f(1), h.f(0)).terms,
                                     feScale(Scalar::q(2), h.multiply(h.f(0), h.f(1)).terms)));
    CHECK(h.ePrime(0, inner).isZero());
    HalfElement proj = h.bosonProjector(0, inner);
    CHECK(h.equalInQuotient(proj, inner));

    HalfElement pf = h.bosonProjector(0, h.f(0));
    CHECK(h.isZeroInQuotient(pf));

    HalfElement f12 = h.multiply(h.f(0), h.f(1));
    HalfElement u0 = h.bosonProjector(0, f12);
    CHECK(h.isZeroInQuotient(h.ePrime(0, u0)));

    // series route agrees with the solve route, and e P = P f = 0
    Rng g(31);
    for (const auto& z : {RootVec(std::vector<int>{-2, -1}), RootVec(std::vector<int>{-3, -1})}) {
        for (int i = 0; i < 2; ++i) {
            HalfElement x = randElement(h, z, g);
            HalfElement a = h.bosonProjector(i, x);
            HalfElement b = h.bosonProjectorSeries(i, x);
            CHECK(h.equalInQuotient(a, b));
            CHECK(h.isZeroInQuotient(h.ePrime(i, b)));
            HalfElement pfx = h.bosonProjectorSeries(i, h.multiply(h.f(i), x));
            CHECK(h.isZeroInQuotient(pfx));
        }
    }
}

TEST_CASE("string decomposition") {
    auto& h12 = osp12();
    auto d0 = h12.stringDecompose(0, h12.one());
    REQUIRE(d0.size() == 1);
    CHECK(d0[0].n == 0);
    CHECK(d0[0].u.terms == h12.one().terms);

    HalfElement f3 = h12.dividedPowerMonomial({{0, 3}});
    auto d3 = h12.stringDecompose(0, f3);
    REQUIRE(d3.size() == 1);
    CHECK(d3[0].n == 3);
    CHECK(d3[0].u.terms == h12.one().terms);

    auto& h14 = osp14();
    HalfElement x = h14.multiply(h14.multiply(h14.f(0), h14.f(1)), h14.f(0));
    auto dx = h14.stringDecompose(0, x);
    CHECK(!dx.empty());
    for (const auto& sc : dx) CHECK(h14.isZeroInQuotient(h14.ePrime(0, sc.u)));
}

TEST_CASE("rho anti-involution") {
    auto& h = osp14();
    HalfElement p = h.multiply(h.f(0), h.f(1));
    CHECK(h.rho(p).terms == h.multiply(h.f(1), h.f(0)).terms);
    HalfElement dp = h.dividedPowerMonomial({{0, 3}});
    CHECK(h.rho(dp).terms == dp.terms);
    Rng g(23);
    RootVec z(std::vector<int>{-2, -2});
    HalfElement x = randElement(h, z, g);
    CHECK(h.rho(h.rho(x)).terms == x.terms);
    // isometry (P^rho, Q^rho) = (P, Q) up to height 5
    for (const auto& w : {RootVec(std::vector<int>{-2, -1}), RootVec(std::vector<int>{-3, -2}),
                          RootVec(std::vector<int>{-3, -1})}) {
        HalfElement a = randElement(h, w, g);
        HalfElement b = randElement(h, w, g);
        CHECK(h.polarization(h.rho(a), h.rho(b)) == h.polarization(a, b));
    }
}

TEST_CASE("boson commutation as operator identity") {
    // e^n f^(m) = sum_t (pi q)^(C(t+1,2)-nm) q^(-(n-t)(m-t)) [n,t] f^(m-t) e^(n-t)
    auto& h = osp12();
    const auto& cd = h.datum();
    Rng g(24);
    for (int n = 1; n <= 2; ++n)
        for (int m = 1; m <= 3; ++m) {
            RootVec z(std::vector<int>{-3});
            HalfElement x = randElement(h, z, g);
            HalfElement lhs = h.multiply(h.dividedPowerMonomial({{0, m}}), x);
            for (int s = 0; s < n; ++s) lhs = h.ePrime(0, lhs);
            FreeElt rhs;
            for (int t = 0; t <= std::min(n, m); ++t) {
                long e1 = static_cast<long>(t + 1) * t / 2 - static_cast<long>(n) * m;
                Scalar c = cd.piQi(0, e1) * cd.qi(0, -static_cast<long>(n - t) * (m - t)) *
                           cd.qbinom(0, n, t);
                HalfElement cur = x;
                for (int s = 0; s < n - t; ++s) cur = h.ePrime(0, cur);
                cur = h.multiply(h.dividedPowerMonomial({{0, m - t}}), cur);
                rhs = feAdd(rhs, feScale(c, cur.terms));
            }
            RootVec at = z;
            at.coords[0] += n - m;
            CHECK(svIsZero(svSub(h.reduceAt(lhs.terms, at), h.reduceAt(rhs, at))));
        }
}
