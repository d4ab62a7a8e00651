#pragma once

#include <cstdint>
#include <vector>

#include "mpskit/truth_table.hpp"

namespace mpskit {

enum class Lit : std::uint8_t { Pos, Neg, DontCare };

// One conjunction of literals over X1..Xn, term[i] describing X_{i+1}.
using Minterm = std::vector<Lit>;

struct Dnf {
    std::size_t arity = 0;
    std::vector<Minterm> terms;

    std::size_t term_count() const { return terms.size(); }
    bool matches(const Minterm& term, std::uint32_t row) const;
    void validate() const;
};

// One Pos/Neg minterm per true row, ascending row order.
Dnf to_dnf(const TruthTable& table);

// OR-semantics expansion back to a table.
TruthTable expand(const Dnf& dnf);

// Prime-implicant cover of the same true set (Quine-McCluskey). Exact minimum
// cover via Petrick for small instances, greedy cover otherwise; m' <= m.
Dnf minimize(const Dnf& dnf);

}  // namespace mpskit
