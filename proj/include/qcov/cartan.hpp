#pragma once

#include "qcov/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcov {

/// Element of the root lattice written as sum_j coords[j] * alpha_j.
/// Weights of U^- live in the antidominant cone (all coords <= 0).
struct RootVec {
    std::vector<int> coords;

    RootVec() = default;
    explicit RootVec(size_t rank) : coords(rank, 0) {}
    explicit RootVec(std::vector<int> c) : coords(std::move(c)) {}

    static RootVec alpha(size_t rank, int i);

    size_t rank() const { return coords.size(); }
    int height() const;  // sum of |coords|

    RootVec operator+(const RootVec& o) const;
    RootVec operator-(const RootVec& o) const;
    RootVec operator-() const;
    friend bool operator==(const RootVec& a, const RootVec& b) = default;
    friend bool operator<(const RootVec& a, const RootVec& b) {
        return a.coords < b.coords;
    }

    std::string str() const;
};

struct ValidationItem {
    std::string condition;  // "a".."f" or "odd-nonempty"
    bool ok;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool ok() const;
};

/// Super generalized Cartan matrix of anisotropic type together with the
/// parity vector and symmetrizers. Immutable once validated.
struct CartanDatum {
    std::string name;           // catalog name or "custom"
    std::vector<std::vector<int>> A;
    std::vector<int> parity;    // p : I -> {0,1}
    std::vector<int> d;         // positive symmetrizers, gcd 1

    size_t rank() const { return A.size(); }
    int a(int i, int j) const { return A[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    int p(int i) const { return parity[static_cast<size_t>(i)]; }
    int di(int i) const { return d[static_cast<size_t>(i)]; }

    /// pi_i^e * q_i^k as a Scalar (q_i = q^d_i, pi_i = pi^p(i))
    Scalar qi(int i, long k) const;
    Scalar piQi(int i, long k) const;  // (pi_i q_i)^k
    Scalar piPow(int i, long e) const; // pi_i^e
    Scalar qint(int i, int n) const { return qpiInteger(n, di(i), p(i)); }
    Scalar qfact(int i, int n) const { return qpiFactorial(n, di(i), p(i)); }
    Scalar qbinom(int i, int n, int a) const { return qpiBinomial(n, a, di(i), p(i)); }

    ValidationReport validate() const;

    /// Parity of a word weight: sum of p over letters with multiplicity.
    int parityOf(const RootVec& zeta) const;
};

/// Weight lambda + zeta, where lambda is a fixed dominant weight recorded by
/// its pairings base[i] = <alpha_i^vee, lambda> and zeta is a root-lattice
/// shift. Only pairings against the alpha_i^vee are ever consumed.
struct Weight {
    std::vector<int> base;
    RootVec shift;

    Weight() = default;
    Weight(std::vector<int> b, RootVec s) : base(std::move(b)), shift(std::move(s)) {}
    static Weight dominant(std::vector<int> b);
    static Weight fundamental(size_t rank, int j);

    size_t rank() const { return base.size(); }
    bool isDominant() const;
    friend bool operator==(const Weight& a, const Weight& b) = default;
};

/// <alpha_i^vee, lambda + zeta> = base[i] + sum_j a_ij * zeta_j
int pairing(const CartanDatum& cd, const Weight& w, int i);
int pairingShift(const CartanDatum& cd, const std::vector<int>& base, const RootVec& zeta, int i);

/// Built-in catalog: osp12, osp14, osp16, rank2aniso, odd_pair.
std::vector<std::string> catalogNames();
std::optional<CartanDatum> catalogDatum(const std::string& name);

} // namespace qcov
