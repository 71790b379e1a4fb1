#pragma once

#include "qcov/cartan.hpp"
#include "qcov/linalg.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace qcov {

/// A monomial in the generators F_i, stored as the sequence of indices.
using Word = std::vector<int>;

/// Exact linear combination of words.
using FreeElt = std::map<Word, Scalar>;

RootVec wordWeight(const CartanDatum& cd, const Word& w);  // lies in Q^-
int wordParity(const CartanDatum& cd, const Word& w);

void feAdd(FreeElt& acc, const Word& w, const Scalar& c);
FreeElt feAdd(const FreeElt& a, const FreeElt& b);
FreeElt feSub(const FreeElt& a, const FreeElt& b);
FreeElt feScale(const Scalar& c, const FreeElt& a);
bool feZero(const FreeElt& a);

/// Homogeneous element of U^-: all words share the weight and parity tags.
struct HalfElement {
    RootVec weight;  // in Q^- (all coordinates <= 0)
    int parity = 0;
    FreeElt terms;

    bool isZero() const { return terms.empty(); }
};

/// Chosen basis data for one weight space of U^-. The quotient by the
/// radical of the polarization is realized by the lexicographically earliest
/// maximal subset of words whose Gram block is invertible in both
/// pi-specializations.
struct WeightSpaceBasis {
    RootVec zeta;
    int parity = 0;
    std::vector<Word> words;     // every word of this weight, lex order
    std::vector<size_t> chosen;  // indices into words
    PairMat gramWords;           // word-level Gram matrix (all words)
    PairMat gram;                // Gram block on the chosen words
    PairMat gramInv;

    size_t dim() const { return chosen.size(); }
    const Word& basisWord(size_t k) const { return words[chosen[k]]; }
};

struct StringComponent {
    int n;          // divided-power exponent
    HalfElement u;  // kernel part, E_i'(u) = 0
};

/// Context object for U^- over a fixed datum: weight-space bases, the
/// polarization, the twisted derivations E_i' and E_i'', Kashiwara operators
/// and the rank-1 boson projector. All public methods are thread-safe; memo
/// tables sit behind a recursive mutex and computed bases are immutable.
class HalfAlgebra {
public:
    HalfAlgebra(CartanDatum cd, int cutoff);

    const CartanDatum& datum() const { return cd_; }
    int cutoff() const { return cutoff_; }

    HalfElement one() const;
    HalfElement f(int i) const;
    HalfElement make(FreeElt terms) const;
    /// Product of divided powers F_i^(n), e.g. {{0,4},{1,1}} -> F_1^(4) F_2.
    HalfElement dividedPowerMonomial(const std::vector<std::pair<int, int>>& spec) const;
    /// The Serre element sum_t (-1)^t pi_i^(C(t,2)+t p(j)) [b,t]_i F_i^(b-t) F_j F_i^t.
    HalfElement serreElement(int i, int j) const;

    HalfElement ePrime(int i, const HalfElement& y) const;
    HalfElement eDoublePrime(int i, const HalfElement& y) const;
    HalfElement multiply(const HalfElement& y, const HalfElement& z) const;
    HalfElement rho(const HalfElement& y) const;  // word reversal
    Scalar polarization(const HalfElement& y, const HalfElement& z) const;

    FreeElt ePrimeWord(int i, const Word& w) const;
    FreeElt eDoublePrimeWord(int i, const Word& w) const;
    Scalar polarizationWords(const Word& y, const Word& z) const;

    const WeightSpaceBasis& space(const RootVec& zeta) const;
    SVec reduceAt(const FreeElt& e, const RootVec& zeta) const;
    SVec reduce(const HalfElement& e) const;
    HalfElement lift(const RootVec& zeta, const SVec& coords) const;
    bool isZeroInQuotient(const HalfElement& e) const;
    bool equalInQuotient(const HalfElement& a, const HalfElement& b) const;

    /// Matrix of F_i-multiplication, space(zeta) -> space(zeta - alpha_i).
    PairMat fMatrix(const RootVec& zeta, int i) const;
    /// Matrix of E_i', space(zeta) -> space(zeta + alpha_i).
    PairMat ePrimeMatrix(const RootVec& zeta, int i) const;

    /// Unique decomposition u = sum_n F_i^(n) u_n with E_i'(u_n) = 0,
    /// computed by exact linear solve against kernel bases per weight.
    std::vector<StringComponent> stringDecompose(int i, const HalfElement& u) const;
    HalfElement kashiwaraE(int i, const HalfElement& u) const;
    HalfElement kashiwaraF(int i, const HalfElement& u) const;

    /// Projection of u onto ker E_i' along im F_i (the n=0 string component).
    HalfElement bosonProjector(int i, const HalfElement& u) const;
    /// The same projection evaluated through the alternating divided-power
    /// series; kept as an independent cross-check of the solve route.
    HalfElement bosonProjectorSeries(int i, const HalfElement& u) const;

    std::vector<Word> wordsOfWeight(const RootVec& zeta) const;

private:
    CartanDatum cd_;
    int cutoff_;

    // per (zeta, i) i-string solve machinery, componentwise
    struct StringData {
        std::vector<int> ns;  // exponents with a nonzero kernel at zeta + n alpha_i
        std::vector<std::vector<RFVec>> kerPlus, kerMinus;
        RFMat Mplus, Mminus;       // columns: reduce(F_i^(n) k), grouped by n
        std::vector<size_t> colN;  // column -> position in ns
        std::vector<size_t> colK;  // column -> kernel index
    };

    mutable std::recursive_mutex mu_;
    mutable std::map<std::pair<int, Word>, FreeElt> epMemo_, eppMemo_;
    mutable std::map<std::pair<Word, Word>, Scalar> polMemo_;
    mutable std::map<RootVec, WeightSpaceBasis> spaces_;
    mutable std::map<RootVec, std::map<Word, SVec>> wordReduceMemo_;
    mutable std::map<std::pair<RootVec, int>, PairMat> fMatMemo_, epMatMemo_;
    mutable std::map<std::pair<RootVec, int>, StringData> stringMemo_;

    const StringData& stringData(const RootVec& zeta, int i) const;
    void checkCutoff(const RootVec& zeta) const;
};

} // namespace qcov
