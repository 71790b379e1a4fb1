#include "qcov/linalg.hpp"

#include "qcov/errors.hpp"

#include <algorithm>

namespace qcov {

RFMat rfZeros(size_t rows, size_t cols) {
    return RFMat(rows, RFVec(cols, RatFunc()));
}

RFMat rfIdentity(size_t n) {
    RFMat m = rfZeros(n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = RatFunc(1);
    return m;
}

RFMat rfMul(const RFMat& a, const RFMat& b) {
    size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    RFMat r = rfZeros(n, m);
    for (size_t i = 0; i < n; ++i) {
        check(a[i].size() == k, "rfMul shape mismatch");
        for (size_t t = 0; t < k; ++t) {
            if (a[i][t].zero()) continue;
            for (size_t j = 0; j < m; ++j)
                if (!b[t][j].zero()) r[i][j] += a[i][t] * b[t][j];
        }
    }
    return r;
}

RFVec rfMulVec(const RFMat& a, const RFVec& v) {
    RFVec r(a.size(), RatFunc());
    for (size_t i = 0; i < a.size(); ++i) {
        check(a[i].size() == v.size(), "rfMulVec shape mismatch");
        for (size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].zero() && !v[j].zero()) r[i] += a[i][j] * v[j];
    }
    return r;
}

RFMat rfAdd(const RFMat& a, const RFMat& b) {
    RFMat r = a;
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r[i].size(); ++j) r[i][j] += b[i][j];
    return r;
}

RFMat rfSub(const RFMat& a, const RFMat& b) {
    RFMat r = a;
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < r[i].size(); ++j) r[i][j] -= b[i][j];
    return r;
}

RFMat rfScale(const RatFunc& c, const RFMat& a) {
    RFMat r = a;
    for (auto& row : r)
        for (auto& x : row) x *= c;
    return r;
}

RFMat rfTranspose(const RFMat& a) {
    size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    RFMat r = rfZeros(m, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) r[j][i] = a[i][j];
    return r;
}

bool rfIsZero(const RFMat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!x.zero()) return false;
    return true;
}

// Row echelon in place; returns pivot columns. Deterministic: first nonzero
// entry in column order is the pivot.
static std::vector<size_t> rowEchelon(RFMat& a) {
    std::vector<size_t> pivots;
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = rows;
        for (size_t i = r; i < rows; ++i)
            if (!a[i][c].zero()) {
                sel = i;
                break;
            }
        if (sel == rows) continue;
        std::swap(a[r], a[sel]);
        RatFunc inv = RatFunc(1) / a[r][c];
        for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].zero()) continue;
            RatFunc f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

size_t rfRank(RFMat a) { return rowEchelon(a).size(); }

RatFunc rfDet(RFMat a) {
    size_t n = a.size();
    check(n == 0 || a[0].size() == n, "rfDet needs a square matrix");
    RatFunc det(1);
    for (size_t c = 0; c < n; ++c) {
        size_t sel = n;
        for (size_t i = c; i < n; ++i)
            if (!a[i][c].zero()) {
                sel = i;
                break;
            }
        if (sel == n) return RatFunc();
        if (sel != c) {
            std::swap(a[c], a[sel]);
            det = -det;
        }
        det *= a[c][c];
        RatFunc inv = RatFunc(1) / a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c].zero()) continue;
            RatFunc f = a[i][c] * inv;
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

std::optional<RFVec> rfSolve(const RFMat& a, const RFVec& b) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    check(b.size() == rows, "rfSolve shape mismatch");
    RFMat aug = a;
    for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    std::vector<size_t> pivots = rowEchelon(aug);
    // inconsistent iff a pivot lands in the augmented column
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    RFVec x(cols, RatFunc());
    for (size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = aug[k][cols];
    return x;
}

std::vector<RFVec> rfNullspace(const RFMat& a) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    RFMat e = a;
    std::vector<size_t> pivots = rowEchelon(e);
    std::vector<bool> isPivot(cols, false);
    for (size_t c : pivots) isPivot[c] = true;
    std::vector<RFVec> basis;
    for (size_t freeCol = 0; freeCol < cols; ++freeCol) {
        if (isPivot[freeCol]) continue;
        RFVec v(cols, RatFunc());
        v[freeCol] = RatFunc(1);
        for (size_t k = 0; k < pivots.size(); ++k)
            v[pivots[k]] = -e[k][freeCol];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RFMat> rfInverse(const RFMat& a) {
    size_t n = a.size();
    check(n == 0 || a[0].size() == n, "rfInverse needs a square matrix");
    RFMat aug = a;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug[i].push_back(i == j ? RatFunc(1) : RatFunc());
    }
    std::vector<size_t> pivots = rowEchelon(aug);
    if (pivots.size() != n) return std::nullopt;
    for (size_t k = 0; k < n; ++k)
        if (pivots[k] != k) return std::nullopt;
    RFMat inv = rfZeros(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

PairMat PairMat::zeros(size_t rows, size_t cols) {
    return {rfZeros(rows, cols), rfZeros(rows, cols)};
}

PairMat PairMat::identity(size_t n) { return {rfIdentity(n), rfIdentity(n)}; }

PairMat PairMat::fromScalars(const std::vector<SVec>& rows) {
    PairMat m = zeros(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j]);
    return m;
}

void PairMat::set(size_t i, size_t j, const Scalar& s) {
    plus[i][j] = s.plus;
    minus[i][j] = s.minus;
}

SVec PairMat::mulVec(const SVec& v) const {
    auto [vp, vm] = svSplit(v);
    return svJoin(rfMulVec(plus, vp), rfMulVec(minus, vm));
}

size_t PairMat::rank() const {
    size_t rp = rfRank(plus), rm = rfRank(minus);
    check(rp == rm, "rank differs between pi=+1 and pi=-1 components");
    return rp;
}

std::optional<PairMat> PairMat::inverse() const {
    auto ip = rfInverse(plus);
    auto im = rfInverse(minus);
    if (!ip || !im) return std::nullopt;
    return PairMat{std::move(*ip), std::move(*im)};
}

std::optional<SVec> PairMat::solve(const SVec& b) const {
    auto [bp, bm] = svSplit(b);
    auto xp = rfSolve(plus, bp);
    auto xm = rfSolve(minus, bm);
    if (!xp || !xm) return std::nullopt;
    return svJoin(*xp, *xm);
}

bool PairMat::invertibleBoth() const {
    if (rows() != cols()) return false;
    return !rfDet(plus).zero() && !rfDet(minus).zero();
}

SVec svZeros(size_t n) { return SVec(n, Scalar(0)); }

SVec svAdd(const SVec& a, const SVec& b) {
    SVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

SVec svSub(const SVec& a, const SVec& b) {
    SVec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

SVec svScale(const Scalar& c, const SVec& v) {
    SVec r = v;
    for (auto& x : r) x *= c;
    return r;
}

bool svIsZero(const SVec& v) {
    for (const auto& x : v)
        if (!x.isZero()) return false;
    return true;
}

std::pair<RFVec, RFVec> svSplit(const SVec& v) {
    RFVec p, m;
    p.reserve(v.size());
    m.reserve(v.size());
    for (const auto& s : v) {
        p.push_back(s.plus);
        m.push_back(s.minus);
    }
    return {std::move(p), std::move(m)};
}

SVec svJoin(const RFVec& p, const RFVec& m) {
    check(p.size() == m.size(), "svJoin size mismatch");
    SVec v;
    v.reserve(p.size());
    for (size_t i = 0; i < p.size(); ++i) v.push_back({p[i], m[i]});
    return v;
}

// ---- DVR lattice ----

DvrLattice DvrLattice::fromGenerators(size_t ambientDim, const std::vector<RFVec>& gens) {
    DvrLattice L;
    L.dim = ambientDim;
    std::vector<RFVec> work;
    for (const auto& g : gens) {
        check(g.size() == ambientDim, "lattice generator has wrong dimension");
        work.push_back(g);
    }
    for (;;) {
        // pick the entry of minimal valuation among remaining vectors
        size_t bestVec = work.size(), bestRow = 0;
        long bestVal = RatFunc::VAL_INF;
        for (size_t k = 0; k < work.size(); ++k)
            for (size_t r = 0; r < ambientDim; ++r) {
                long v = work[k][r].val0();
                if (v < bestVal) {
                    bestVal = v;
                    bestVec = k;
                    bestRow = r;
                }
            }
        if (bestVec == work.size()) break;  // all zero
        RFVec h = work[bestVec];
        // normalize the pivot entry to exactly q^bestVal
        RatFunc unit = h[bestRow] / RatFunc::qpow(bestVal);
        RatFunc scale = RatFunc(1) / unit;
        for (auto& x : h) x *= scale;
        // eliminate the pivot row from every other vector (quotients lie in A)
        RatFunc piv = h[bestRow];
        for (size_t k = 0; k < work.size(); ++k) {
            if (k == bestVec || work[k][bestRow].zero()) continue;
            RatFunc c = work[k][bestRow] / piv;
            check(c.val0() >= 0, "DVR elimination coefficient not regular at q=0");
            for (size_t r = 0; r < ambientDim; ++r) work[k][r] -= c * h[r];
        }
        work.erase(work.begin() + static_cast<std::ptrdiff_t>(bestVec));
        // also clear the pivot row of previously accepted basis vectors so the
        // final basis is triangular in both directions of the pivot order
        for (size_t j = 0; j < L.basis.size(); ++j) {
            if (L.basis[j][bestRow].zero()) continue;
            RatFunc c = L.basis[j][bestRow] / piv;
            check(c.val0() >= 0, "DVR back-elimination coefficient not regular at q=0");
            for (size_t r = 0; r < ambientDim; ++r) L.basis[j][r] -= c * h[r];
        }
        L.basis.push_back(std::move(h));
        L.pivRow.push_back(bestRow);
        L.pivVal.push_back(bestVal);
    }
    return L;
}

std::optional<RFVec> DvrLattice::fieldCoords(const RFVec& v) const {
    check(v.size() == dim, "fieldCoords dimension mismatch");
    RFVec rem = v;
    RFVec coords(basis.size(), RatFunc());
    for (size_t j = 0; j < basis.size(); ++j) {
        RatFunc c = rem[pivRow[j]] / RatFunc::qpow(pivVal[j]);
        coords[j] = c;
        if (!c.zero())
            for (size_t r = 0; r < dim; ++r) rem[r] -= c * basis[j][r];
    }
    for (const auto& x : rem)
        if (!x.zero()) return std::nullopt;
    return coords;
}

bool DvrLattice::contains(const RFVec& v) const {
    auto c = fieldCoords(v);
    if (!c) return false;
    for (const auto& x : *c)
        if (x.val0() < 0) return false;
    return true;
}

std::optional<std::vector<Rat>> DvrLattice::residue(const RFVec& v) const {
    auto c = fieldCoords(v);
    if (!c) return std::nullopt;
    std::vector<Rat> r;
    r.reserve(c->size());
    for (const auto& x : *c) {
        if (x.val0() < 0) return std::nullopt;
        r.push_back(x.eval0());
    }
    return r;
}

bool DvrLattice::sameLattice(const DvrLattice& other) const {
    if (dim != other.dim || rank() != other.rank()) return false;
    for (const auto& h : basis)
        if (!other.contains(h)) return false;
    for (const auto& h : other.basis)
        if (!contains(h)) return false;
    return true;
}

PairLattice PairLattice::fromGenerators(size_t ambientDim, const std::vector<SVec>& gens) {
    std::vector<RFVec> gp, gm;
    for (const auto& g : gens) {
        auto [p, m] = svSplit(g);
        gp.push_back(std::move(p));
        gm.push_back(std::move(m));
    }
    PairLattice L{DvrLattice::fromGenerators(ambientDim, gp),
                  DvrLattice::fromGenerators(ambientDim, gm)};
    check(L.plus.rank() == L.minus.rank(),
          "lattice rank differs between pi=+1 and pi=-1 components");
    return L;
}

bool PairLattice::contains(const SVec& v) const {
    auto [p, m] = svSplit(v);
    return plus.contains(p) && minus.contains(m);
}

std::optional<std::vector<QPair>> PairLattice::residue(const SVec& v) const {
    auto [p, m] = svSplit(v);
    auto rp = plus.residue(p);
    auto rm = minus.residue(m);
    if (!rp || !rm) return std::nullopt;
    std::vector<QPair> r;
    r.reserve(rp->size());
    for (size_t i = 0; i < rp->size(); ++i) r.push_back({(*rp)[i], (*rm)[i]});
    return r;
}

bool PairLattice::sameLattice(const PairLattice& other) const {
    return plus.sameLattice(other.plus) && minus.sameLattice(other.minus);
}

std::vector<QPair> qpFlip(const std::vector<QPair>& v) {
    std::vector<QPair> r = v;
    for (auto& x : r) x.second = -x.second;
    return r;
}

bool qpIsZero(const std::vector<QPair>& v) {
    for (const auto& x : v)
        if (x.first != 0 || x.second != 0) return false;
    return true;
}

} // namespace qcov
