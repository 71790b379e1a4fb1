#pragma once

#include "qcov/half_algebra.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace qcov {

/// One weight space of a weight module, with assembled action matrices.
/// E[i] maps into the space at zeta + alpha_i, F[i] into zeta - alpha_i.
/// A missing entry means the target space was never built (truncation);
/// a matrix with zero rows means the target space is zero.
struct ModuleSpace {
    RootVec zeta;
    size_t dim = 0;
    int parity = 0;
    PairMat gram;
    std::map<int, PairMat> E, F;
};

/// Weight module presented by weight spaces and exact action matrices.
/// Serves V(lambda), tensor products, and the boson realization of U^-.
struct WeightModule {
    const CartanDatum* cd = nullptr;
    std::vector<int> lamBase;  // <alpha_i^vee, Lambda> for the highest weight
    std::map<RootVec, ModuleSpace> spaces;
    int heightLimit = -1;  // >= 0 when spaces below this height are not built
    std::string label;

    const ModuleSpace* space(const RootVec& z) const;
    size_t dimAt(const RootVec& z) const;
    int pairingAt(const RootVec& z, int i) const;
    size_t totalDim() const;
    bool complete() const { return heightLimit < 0; }
    /// true when every weight this relation step could touch is known
    bool knownAt(const RootVec& z) const;

    // diagonal actions on the weight space at shift z
    Scalar kAction(const RootVec& z, int j) const;       // K_{alpha_j^vee}
    Scalar jAction(const RootVec& z, int j) const;       // J_{alpha_j^vee}
    Scalar kTildeAction(const RootVec& z, int i) const;  // q_i^<...>
    Scalar jTildeAction(const RootVec& z, int i) const;  // pi_i^<...>
};

/// Coordinates of a vector in one weight space of a module.
struct ModuleVector {
    const WeightModule* mod = nullptr;
    RootVec zeta;
    SVec coords;

    bool isZero() const { return svIsZero(coords); }
    int parity() const;
};

Scalar modulePolarization(const ModuleVector& a, const ModuleVector& b);

/// Irreducible highest-weight module V(lambda): weight spaces are quotients
/// of U^- weight spaces by the radical of the contravariant form, which is
/// evaluated by the two-term recursion through E_i'' and E_i'.
class SimpleModule {
public:
    SimpleModule(HalfAlgebra& half, std::vector<int> lamBase, int heightCutoff,
                 size_t dimBudget = 400);

    const WeightModule& wm() const { return wm_; }
    HalfAlgebra& half() const { return half_; }
    const std::vector<int>& lamBase() const { return wm_.lamBase; }

    Scalar formWords(const Word& x, const Word& y) const;
    Scalar formFree(const FreeElt& x, const FreeElt& y) const;
    /// image of an element of U^-_zeta in module coordinates at shift zeta
    SVec moduleReduce(const FreeElt& e, const RootVec& zeta) const;
    const std::vector<Word>& basisWords(const RootVec& zeta) const;
    ModuleVector highest() const;

private:
    HalfAlgebra& half_;
    WeightModule wm_;
    std::map<RootVec, std::vector<Word>> basisWords_;
    std::map<RootVec, PairMat> gramInv_;
    mutable std::map<std::pair<Word, Word>, Scalar> formMemo_;
    mutable std::recursive_mutex mu_;

    void build(int heightCutoff, size_t dimBudget);
};

enum class Coproduct { Delta, DeltaPrime };

/// Basis vector of a tensor weight space: factor shifts and factor indices.
struct TensorBasisRef {
    RootVec za, zb;
    size_t ia = 0, ib = 0;
    friend bool operator<(const TensorBasisRef& x, const TensorBasisRef& y) {
        if (!(x.za == y.za)) return x.za < y.za;
        if (x.ia != y.ia) return x.ia < y.ia;
        return x.ib < y.ib;
    }
    friend bool operator==(const TensorBasisRef& x, const TensorBasisRef& y) = default;
};

/// Tensor product of two complete weight modules under Delta or Delta'.
/// The bilinear form is the product form (the J-polarization pairing).
struct TensorModule {
    WeightModule wm;
    const WeightModule* A = nullptr;
    const WeightModule* B = nullptr;
    Coproduct flag = Coproduct::Delta;
    std::map<RootVec, std::vector<TensorBasisRef>> refs;

    size_t indexOf(const RootVec& z, const TensorBasisRef& r) const;
    /// coordinates of u (x) v for u at shift za, v at shift zb
    SVec productVector(const RootVec& za, const SVec& u, const RootVec& zb,
                       const SVec& v) const;
};

TensorModule tensorModule(const WeightModule& A, const WeightModule& B, Coproduct flag,
                          size_t dimBudget = 400);

/// i-string decomposition machinery on a weight module: exact linear solve
/// against ker E_i per weight space.
class ModuleString {
public:
    explicit ModuleString(const WeightModule& m) : m_(m) {}

    std::vector<std::pair<int, ModuleVector>> decompose(int i, const ModuleVector& v) const;
    ModuleVector ftilde(int i, const ModuleVector& v) const;
    ModuleVector etilde(int i, const ModuleVector& v) const;
    /// Pads with zero when the whole i-string solve is possible but v is 0.
    bool ftildeTargetBuilt(int i, const RootVec& z) const;

private:
    const WeightModule& m_;

    struct Data {
        std::vector<int> ns;
        std::vector<std::vector<RFVec>> kerPlus, kerMinus;
        RFMat Mplus, Mminus;
        std::vector<size_t> colN, colK;
    };
    mutable std::map<std::pair<RootVec, int>, Data> memo_;
    mutable std::recursive_mutex mu_;

    const Data& data(const RootVec& z, int i) const;
    ModuleVector assemble(int i, const ModuleVector& v, int shift) const;
};

/// Matrix of a word of operators ('E' or 'F', index) applied left to right in
/// the displayed order, i.e. ops = {F_a, F_b} is the operator F_a F_b. Missing
/// intermediate spaces count as zero, which is exact for complete modules.
PairMat composeOps(const WeightModule& m, const RootVec& z,
                   const std::vector<std::pair<char, int>>& ops);

struct RelationReport {
    std::vector<std::pair<std::string, bool>> items;
    bool ok() const;
    std::string firstFailure() const;
};

/// Exact matrix verification of the defining relations on every built weight
/// space (group laws of K and J, the K/J commutations with E and F, both
/// Serre relations, and the EF supercommutator identity).
RelationReport checkRelations(const WeightModule& m);

/// dims per height/weight agree between the two pi-specializations by
/// construction; this recomputes the characters for reporting.
std::map<RootVec, size_t> moduleCharacter(const WeightModule& m);

/// Apply the module action of a word in the F_i to a vector.
ModuleVector actWord(const WeightModule& m, const Word& w, const ModuleVector& v);

/// Highest-weight intertwiners between V(lambda+mu) and the two tensor
/// module structures on V(lambda) (x) V(mu). Matrices are stored per shift z
/// from the combined highest weight. Phi embeds V(lambda+mu), Psi projects
/// back along the isotypic complement (the submodule generated by the
/// singular vectors other than the top one); S extracts the coefficient of
/// the second highest-weight vector.
struct TensorMaps {
    std::map<RootVec, PairMat> Phi, PhiPrime;  // V(l+m)^z -> T^z / T'^z
    std::map<RootVec, PairMat> Psi, PsiPrime;  // T^z / T'^z -> V(l+m)^z
    std::map<RootVec, PairMat> S;              // T^z -> V(l)^z
};

TensorMaps tensorMaps(const SimpleModule& VL, const SimpleModule& VM, const SimpleModule& VLM,
                      const TensorModule& T, const TensorModule& Tp);

/// Joint kernel of all E_i on the weight space at shift z, componentwise.
std::pair<std::vector<RFVec>, std::vector<RFVec>> singularVectors(const WeightModule& m,
                                                                  const RootVec& z);

struct JPolReport {
    bool adjunctionHolds = false;  // (Delta(u) x, y) = (x, Delta'(tau1(u)) y)
    bool deltaOnlyFails = false;   // the same identity with Delta on both sides breaks
    std::vector<std::string> details;
};

/// Verify the mixed-coproduct adjunction on the generators E_i, F_i, K_j, J_j
/// against the product form, and reproduce the failure of the unmixed
/// version at an odd index with odd pairing.
JPolReport jPolarizationCheck(const TensorModule& T, const TensorModule& Tp);

} // namespace qcov
