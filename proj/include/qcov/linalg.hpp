#pragma once

#include "qcov/scalar.hpp"

#include <optional>
#include <vector>

namespace qcov {

using RFVec = std::vector<RatFunc>;
using RFMat = std::vector<RFVec>;  // row-major
using SVec = std::vector<Scalar>;

RFMat rfZeros(size_t rows, size_t cols);
RFMat rfIdentity(size_t n);
RFMat rfMul(const RFMat& a, const RFMat& b);
RFVec rfMulVec(const RFMat& a, const RFVec& v);
RFMat rfAdd(const RFMat& a, const RFMat& b);
RFMat rfSub(const RFMat& a, const RFMat& b);
RFMat rfScale(const RatFunc& c, const RFMat& a);
RFMat rfTranspose(const RFMat& a);
bool rfIsZero(const RFMat& a);

size_t rfRank(RFMat a);
RatFunc rfDet(RFMat a);
/// Solve A x = b; returns nullopt when inconsistent. When the kernel is
/// nontrivial the returned solution is the one with free variables set to 0.
std::optional<RFVec> rfSolve(const RFMat& a, const RFVec& b);
std::vector<RFVec> rfNullspace(const RFMat& a);
std::optional<RFMat> rfInverse(const RFMat& a);

/// Matrix over Q(q)^pi kept as its two specialization components.
struct PairMat {
    RFMat plus, minus;

    PairMat() = default;
    PairMat(RFMat p, RFMat m) : plus(std::move(p)), minus(std::move(m)) {}
    static PairMat zeros(size_t rows, size_t cols);
    static PairMat identity(size_t n);
    static PairMat fromScalars(const std::vector<SVec>& rows);

    size_t rows() const { return plus.size(); }
    size_t cols() const { return plus.empty() ? 0 : plus[0].size(); }
    Scalar at(size_t i, size_t j) const { return {plus[i][j], minus[i][j]}; }
    void set(size_t i, size_t j, const Scalar& s);

    friend PairMat operator*(const PairMat& a, const PairMat& b) {
        return {rfMul(a.plus, b.plus), rfMul(a.minus, b.minus)};
    }
    friend PairMat operator+(const PairMat& a, const PairMat& b) {
        return {rfAdd(a.plus, b.plus), rfAdd(a.minus, b.minus)};
    }
    friend PairMat operator-(const PairMat& a, const PairMat& b) {
        return {rfSub(a.plus, b.plus), rfSub(a.minus, b.minus)};
    }
    PairMat scale(const Scalar& c) const {
        return {rfScale(c.plus, plus), rfScale(c.minus, minus)};
    }
    PairMat transpose() const { return {rfTranspose(plus), rfTranspose(minus)}; }
    bool isZero() const { return rfIsZero(plus) && rfIsZero(minus); }
    friend bool operator==(const PairMat& a, const PairMat& b) = default;

    SVec mulVec(const SVec& v) const;
    /// Rank must agree between components (freeness over Q(q)^pi); asserted.
    size_t rank() const;
    std::optional<PairMat> inverse() const;
    /// Componentwise solve; nullopt when either component is inconsistent.
    std::optional<SVec> solve(const SVec& b) const;
    bool invertibleBoth() const;
};

SVec svZeros(size_t n);
SVec svAdd(const SVec& a, const SVec& b);
SVec svSub(const SVec& a, const SVec& b);
SVec svScale(const Scalar& c, const SVec& v);
bool svIsZero(const SVec& v);
std::pair<RFVec, RFVec> svSplit(const SVec& v);
SVec svJoin(const RFVec& p, const RFVec& m);

/// Free module over the local ring of rational functions regular at q=0,
/// presented by a valuation-triangular basis: basis[j] has a pivot row
/// pivRow[j] where its entry is exactly q^pivVal[j], and basis[k][pivRow[j]]=0
/// for k > j. Built from an arbitrary generating set by column reduction with
/// minimal-valuation pivoting.
struct DvrLattice {
    std::vector<RFVec> basis;
    std::vector<size_t> pivRow;
    std::vector<long> pivVal;
    size_t dim = 0;  // ambient dimension

    static DvrLattice fromGenerators(size_t ambientDim, const std::vector<RFVec>& gens);

    size_t rank() const { return basis.size(); }
    /// Coordinates of v in the basis over the field; nullopt if outside span.
    std::optional<RFVec> fieldCoords(const RFVec& v) const;
    bool contains(const RFVec& v) const;
    /// Residue of a lattice member modulo q: coordinates evaluated at q=0.
    std::optional<std::vector<Rat>> residue(const RFVec& v) const;
    bool sameLattice(const DvrLattice& other) const;
};

using QPair = std::pair<Rat, Rat>;

/// Lattice over A^pi as a pair of componentwise lattices of equal rank.
struct PairLattice {
    DvrLattice plus, minus;

    static PairLattice fromGenerators(size_t ambientDim, const std::vector<SVec>& gens);
    size_t rank() const { return plus.rank(); }
    bool contains(const SVec& v) const;
    /// Residue in (L/qL) as a vector of Q^pi pairs; nullopt when not a member.
    std::optional<std::vector<QPair>> residue(const SVec& v) const;
    bool sameLattice(const PairLattice& other) const;
};

/// Residue helpers: pi-flip multiplies the minus component by -1.
std::vector<QPair> qpFlip(const std::vector<QPair>& v);
bool qpIsZero(const std::vector<QPair>& v);

} // namespace qcov
