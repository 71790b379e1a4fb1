#pragma once

#include <stdexcept>
#include <string>

namespace qcov {

struct DivisionByZeroDivisor : std::domain_error {
    explicit DivisionByZeroDivisor(const std::string& what)
        : std::domain_error("division by zero divisor: " + what) {}
};

struct NotRegularAtZero : std::domain_error {
    explicit NotRegularAtZero(const std::string& what)
        : std::domain_error("not regular at q=0: " + what) {}
};

struct IndexOutOfRange : std::out_of_range {
    explicit IndexOutOfRange(const std::string& what)
        : std::out_of_range("index out of range: " + what) {}
};

struct CutoffExceeded : std::runtime_error {
    explicit CutoffExceeded(const std::string& what)
        : std::runtime_error("height cutoff exceeded: " + what) {}
};

struct DimensionBudgetExceeded : std::runtime_error {
    explicit DimensionBudgetExceeded(const std::string& what)
        : std::runtime_error("dimension budget exceeded: " + what) {}
};

struct NonDominantWeight : std::invalid_argument {
    explicit NonDominantWeight(const std::string& what)
        : std::invalid_argument("weight is not dominant: " + what) {}
};

struct ModuleMismatch : std::invalid_argument {
    explicit ModuleMismatch(const std::string& what)
        : std::invalid_argument("vectors from different modules: " + what) {}
};

struct NonTerminating : std::runtime_error {
    explicit NonTerminating(const std::string& what)
        : std::runtime_error("correction did not terminate within degree bound: " + what) {}
};

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what)
        : std::invalid_argument("parse error: " + what) {}
};

// Internal consistency failure: an invariant the construction relies on did
// not hold (rank mismatch between pi-components, inconsistent solve, ...).
struct InternalCheck : std::logic_error {
    explicit InternalCheck(const std::string& what)
        : std::logic_error("internal consistency check failed: " + what) {}
};

inline void check(bool ok, const std::string& what) {
    if (!ok) throw InternalCheck(what);
}

} // namespace qcov
