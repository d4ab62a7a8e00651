#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpskit/dnf.hpp"
#include "mpskit/mps.hpp"

namespace mpskit {

// Compiled boolean MPS plus the feature maps it must be evaluated with.
struct BooleanMps {
    Mps mps;
    std::vector<FeatureMap> fms;
};

// Minterm construction: open boundary, phys dim 2 (indicator map [x, 1-x]),
// one bond channel per term. Boundary sites hold the literal indicator
// rows/columns; interior sites hold the pair of diagonal 0/1 matrices. A
// DontCare literal sets both phys components of its diagonal entry, so the
// channel passes regardless of that input. Evaluation on bits yields the
// number of matched terms: exactly the function value for disjoint term
// lists (one term per true row), the match count for overlapping covers.
// An empty term list compiles to the chi=1 all-zero chain (constant 0).
BooleanMps compile(const Dnf& dnf, std::size_t arity);

struct GateSpec {
    enum class Kind { And2, Or2, Not1, UniversalAnd, UniversalOr, Parity, Threshold };

    Kind kind;
    // UniversalAnd / UniversalOr: negated[i] says X_{i+1} enters negated.
    std::vector<bool> negated;
    std::size_t arity = 0;   // Parity / Threshold / Universal*
    std::size_t k = 0;       // Threshold

    static GateSpec and2() { return {Kind::And2, {}, 2, 0}; }
    static GateSpec or2() { return {Kind::Or2, {}, 2, 0}; }
    static GateSpec not1() { return {Kind::Not1, {}, 1, 0}; }
    static GateSpec universal_and(std::vector<bool> negated);
    static GateSpec universal_or(std::vector<bool> negated);
    static GateSpec parity(std::size_t n) { return {Kind::Parity, {}, n, 0}; }
    static GateSpec threshold(std::size_t n, std::size_t k) {
        return {Kind::Threshold, {}, n, k};
    }
};

// And2/Not1/UniversalAnd use the chi=1 direct constructions; the rest route
// through to_dnf + compile. Threshold with k > n yields the constant-false
// chain and sets *warning.
BooleanMps compile_gate(const GateSpec& spec, std::string* warning = nullptr);

struct ComplexityReport {
    std::size_t arity = 0;
    std::size_t term_count = 0;            // m
    std::size_t term_count_minimized = 0;  // m'
    std::size_t parameter_count = 0;
    std::size_t parameter_count_minimized = 0;
};

// Stored-entry counts of the compiled chain and of its minimized-cover
// counterpart; for n >= 2 and m >= 1 the unminimized count is
// 2*m*(2 + (n-2)*m).
ComplexityReport complexity_report(const Dnf& dnf);

// Exhaustive integer evaluation over all 2^n rows, ascending row order.
std::vector<std::int64_t> exhaustive_outputs(const BooleanMps& compiled);

struct VerifyResult {
    bool ok = true;
    std::uint32_t first_mismatch_row = 0;
    std::int64_t got = 0;
    int expected = 0;
    std::size_t rows_checked = 0;
};

// Compares the chain against the table on every row, boolean semantics
// (non-zero counts as true, so overlapping minimized covers verify too).
VerifyResult verify_against_table(const BooleanMps& compiled,
                                  const TruthTable& table);

}  // namespace mpskit
