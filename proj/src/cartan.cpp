#include "qcov/cartan.hpp"

#include "qcov/errors.hpp"

#include <numeric>
#include <sstream>

namespace qcov {

RootVec RootVec::alpha(size_t rank, int i) {
    RootVec r(rank);
    r.coords[static_cast<size_t>(i)] = 1;
    return r;
}

int RootVec::height() const {
    int h = 0;
    for (int c : coords) h += c < 0 ? -c : c;
    return h;
}

RootVec RootVec::operator+(const RootVec& o) const {
    RootVec r(*this);
    for (size_t j = 0; j < coords.size(); ++j) r.coords[j] += o.coords[j];
    return r;
}

RootVec RootVec::operator-(const RootVec& o) const {
    RootVec r(*this);
    for (size_t j = 0; j < coords.size(); ++j) r.coords[j] -= o.coords[j];
    return r;
}

RootVec RootVec::operator-() const {
    RootVec r(*this);
    for (auto& c : r.coords) c = -c;
    return r;
}

std::string RootVec::str() const {
    std::ostringstream os;
    os << "(";
    for (size_t j = 0; j < coords.size(); ++j) {
        if (j) os << ",";
        os << coords[j];
    }
    os << ")";
    return os.str();
}

bool ValidationReport::ok() const {
    for (const auto& it : items)
        if (!it.ok) return false;
    return true;
}

Scalar CartanDatum::qi(int i, long k) const { return Scalar::q(k * di(i)); }

Scalar CartanDatum::piPow(int i, long e) const {
    return (p(i) == 1 && (e % 2 + 2) % 2 == 1) ? Scalar::pi() : Scalar(1);
}

Scalar CartanDatum::piQi(int i, long k) const { return piPow(i, k) * qi(i, k); }

int CartanDatum::parityOf(const RootVec& zeta) const {
    int s = 0;
    for (size_t j = 0; j < zeta.coords.size(); ++j) {
        int m = zeta.coords[static_cast<size_t>(j)];
        s += p(static_cast<int>(j)) * (m < 0 ? -m : m);
    }
    return s & 1;
}

ValidationReport CartanDatum::validate() const {
    ValidationReport rep;
    const int n = static_cast<int>(rank());
    auto add = [&](const std::string& cond, bool ok, const std::string& detail) {
        rep.items.push_back({cond, ok, detail});
    };

    bool shapeOk = !A.empty() && parity.size() == rank() && d.size() == rank();
    for (const auto& row : A) shapeOk = shapeOk && row.size() == rank();
    add("shape", shapeOk, shapeOk ? "" : "matrix/parity/d sizes disagree");
    if (!shapeOk) return rep;

    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n; ++i)
            if (a(i, i) != 2) {
                ok = false;
                det = "a_" + std::to_string(i) + std::to_string(i) + " != 2";
            }
        add("a", ok, det);
    }
    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && a(i, j) > 0) {
                    ok = false;
                    det = "a_" + std::to_string(i) + std::to_string(j) + " > 0";
                }
        add("b", ok, det);
    }
    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((a(i, j) == 0) != (a(j, i) == 0)) {
                    ok = false;
                    det = "zero pattern asymmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")";
                }
        add("c", ok, det);
    }
    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n; ++i)
            if (p(i) == 1)
                for (int j = 0; j < n; ++j)
                    if (a(i, j) % 2 != 0) {
                        ok = false;
                        det = "odd row " + std::to_string(i) + " has odd entry a_" +
                              std::to_string(i) + std::to_string(j);
                    }
        add("d", ok, det);
    }
    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n && ok; ++i) {
            if (di(i) <= 0) {
                ok = false;
                det = "d_" + std::to_string(i) + " <= 0";
                break;
            }
            for (int j = 0; j < n; ++j)
                if (di(i) * a(i, j) != di(j) * a(j, i)) {
                    ok = false;
                    det = "DA not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")";
                    break;
                }
        }
        if (ok) {
            int g = 0;
            for (int x : d) g = std::gcd(g, x);
            if (g != 1) {
                ok = false;
                det = "gcd(d) != 1";
            }
        }
        add("e", ok, det);
    }
    {
        bool ok = true;
        std::string det;
        for (int i = 0; i < n; ++i)
            if ((p(i) & 1) != (di(i) & 1)) {
                ok = false;
                det = "p(" + std::to_string(i) + ") != d_" + std::to_string(i) + " mod 2";
            }
        add("f", ok, det);
    }
    {
        bool any = false;
        for (int i = 0; i < n; ++i) any = any || p(i) == 1;
        add("odd-nonempty", any, any ? "" : "no odd index");
    }
    return rep;
}

Weight Weight::dominant(std::vector<int> b) {
    Weight w;
    w.shift = RootVec(b.size());
    w.base = std::move(b);
    return w;
}

Weight Weight::fundamental(size_t rank, int j) {
    std::vector<int> b(rank, 0);
    b[static_cast<size_t>(j)] = 1;
    return dominant(std::move(b));
}

bool Weight::isDominant() const {
    for (int c : shift.coords)
        if (c != 0) return false;
    for (int b : base)
        if (b < 0) return false;
    return true;
}

int pairingShift(const CartanDatum& cd, const std::vector<int>& base, const RootVec& zeta,
                 int i) {
    if (i < 0 || static_cast<size_t>(i) >= cd.rank())
        throw IndexOutOfRange("pairing index " + std::to_string(i));
    int v = base.empty() ? 0 : base[static_cast<size_t>(i)];
    for (size_t j = 0; j < zeta.coords.size(); ++j)
        v += cd.a(i, static_cast<int>(j)) * zeta.coords[j];
    return v;
}

int pairing(const CartanDatum& cd, const Weight& w, int i) {
    return pairingShift(cd, w.base, w.shift, i);
}

std::vector<std::string> catalogNames() {
    return {"osp12", "osp14", "osp16", "rank2aniso", "odd_pair"};
}

std::optional<CartanDatum> catalogDatum(const std::string& name) {
    CartanDatum cd;
    cd.name = name;
    if (name == "osp12") {
        cd.A = {{2}};
        cd.parity = {1};
        cd.d = {1};
    } else if (name == "osp14") {
        // alpha_1 odd short, alpha_2 even long
        cd.A = {{2, -2}, {-1, 2}};
        cd.parity = {1, 0};
        cd.d = {1, 2};
    } else if (name == "osp16") {
        cd.A = {{2, -2, 0}, {-1, 2, -1}, {0, -1, 2}};
        cd.parity = {1, 0, 0};
        cd.d = {1, 2, 2};
    } else if (name == "rank2aniso") {
        cd.A = {{2, -2}, {-2, 2}};
        cd.parity = {1, 1};
        cd.d = {1, 1};
    } else if (name == "odd_pair") {
        cd.A = {{2, 0}, {0, 2}};
        cd.parity = {1, 1};
        cd.d = {1, 1};
    } else {
        return std::nullopt;
    }
    check(cd.validate().ok(), "catalog datum " + name + " failed validation");
    return cd;
}

} // namespace qcov
