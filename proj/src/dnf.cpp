#include "mpskit/dnf.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "mpskit/error.hpp"

namespace mpskit {

bool Dnf::matches(const Minterm& term, std::uint32_t row) const {
    for (std::size_t i = 1; i <= arity; ++i) {
        const int bit = TruthTable::bit_of(row, i, arity);
        const Lit lit = term[i - 1];
        if (lit == Lit::Pos && bit != 1) return false;
        if (lit == Lit::Neg && bit != 0) return false;
    }
    return true;
}

void Dnf::validate() const {
    if (arity == 0 || arity > TruthTable::kMaxArity) {
        throw_error(ErrorKind::SizeGuard,
                    "arity must be in 1.." + std::to_string(TruthTable::kMaxArity));
    }
    for (const auto& term : terms) {
        if (term.size() != arity) {
            throw_error(ErrorKind::Shape, "minterm length must equal arity");
        }
    }
    auto sorted = terms;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw_error(ErrorKind::InvalidArgument, "duplicate minterm in DNF");
    }
}

Dnf to_dnf(const TruthTable& table) {
    table.validate();
    Dnf d;
    d.arity = table.arity;
    for (std::uint32_t row = 0; row < table.rows(); ++row) {
        if (!table.at(row)) continue;
        Minterm term(table.arity);
        for (std::size_t i = 1; i <= table.arity; ++i) {
            term[i - 1] =
                TruthTable::bit_of(row, i, table.arity) ? Lit::Pos : Lit::Neg;
        }
        d.terms.push_back(std::move(term));
    }
    return d;
}

TruthTable expand(const Dnf& dnf) {
    dnf.validate();
    TruthTable t = TruthTable::zeros(dnf.arity);
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        for (const auto& term : dnf.terms) {
            if (dnf.matches(term, row)) {
                t.outputs[row] = true;
                break;
            }
        }
    }
    return t;
}

namespace {

// Implicant in (value, mask) form over row-index bits; a set mask bit marks a
// DontCare position.
struct Implicant {
    std::uint32_t value = 0;
    std::uint32_t mask = 0;

    bool operator==(const Implicant& other) const = default;
    bool operator<(const Implicant& other) const {
        return value != other.value ? value < other.value : mask < other.mask;
    }
    bool covers(std::uint32_t row) const { return (row & ~mask) == value; }
};

Minterm implicant_to_minterm(const Implicant& imp, std::size_t arity) {
    Minterm term(arity);
    for (std::size_t i = 1; i <= arity; ++i) {
        const std::uint32_t bit = 1u << (arity - i);
        if (imp.mask & bit) {
            term[i - 1] = Lit::DontCare;
        } else {
            term[i - 1] = (imp.value & bit) ? Lit::Pos : Lit::Neg;
        }
    }
    return term;
}

std::vector<Implicant> prime_implicants(std::vector<Implicant> current) {
    std::vector<Implicant> primes;
    while (!current.empty()) {
        std::sort(current.begin(), current.end());
        current.erase(std::unique(current.begin(), current.end()), current.end());
        std::vector<bool> combined(current.size(), false);
        std::vector<Implicant> next;
        for (std::size_t i = 0; i < current.size(); ++i) {
            for (std::size_t j = i + 1; j < current.size(); ++j) {
                if (current[i].mask != current[j].mask) continue;
                const std::uint32_t diff = current[i].value ^ current[j].value;
                if (std::popcount(diff) != 1) continue;
                combined[i] = combined[j] = true;
                next.push_back({current[i].value & ~diff, current[i].mask | diff});
            }
        }
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (!combined[i]) primes.push_back(current[i]);
        }
        current = std::move(next);
    }
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    return primes;
}

// Dynamic bitset over prime indices, for Petrick products.
using PrimeSet = std::vector<std::uint64_t>;

bool subset_of(const PrimeSet& a, const PrimeSet& b) {
    for (std::size_t w = 0; w < a.size(); ++w) {
        if (a[w] & ~b[w]) return false;
    }
    return true;
}

std::size_t set_bits(const PrimeSet& s) {
    std::size_t n = 0;
    for (auto w : s) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

// Petrick's method with absorption pruning. Returns chosen prime indices, or
// an empty optional-equivalent (ok=false) when the product grows past budget.
bool petrick_cover(const std::vector<std::vector<std::size_t>>& choices,
                   std::size_t prime_count, std::size_t budget,
                   std::vector<std::size_t>& out) {
    const std::size_t words = (prime_count + 63) / 64;
    std::vector<PrimeSet> products{PrimeSet(words, 0)};
    for (const auto& sum : choices) {
        std::vector<PrimeSet> next;
        next.reserve(products.size() * sum.size());
        for (const auto& product : products) {
            for (std::size_t p : sum) {
                PrimeSet grown = product;
                grown[p / 64] |= std::uint64_t{1} << (p % 64);
                next.push_back(std::move(grown));
            }
        }
        // Absorption: drop any product that contains another.
        std::sort(next.begin(), next.end(),
                  [](const PrimeSet& a, const PrimeSet& b) {
                      return set_bits(a) < set_bits(b);
                  });
        std::vector<PrimeSet> reduced;
        for (const auto& cand : next) {
            bool absorbed = false;
            for (const auto& kept : reduced) {
                if (subset_of(kept, cand)) {
                    absorbed = true;
                    break;
                }
            }
            if (!absorbed) reduced.push_back(cand);
        }
        products = std::move(reduced);
        if (products.size() > budget) return false;
    }
    // Minimum-cardinality product; ties resolved by lowest prime indices.
    const PrimeSet* best = nullptr;
    for (const auto& product : products) {
        if (!best || set_bits(product) < set_bits(*best) ||
            (set_bits(product) == set_bits(*best) && product < *best)) {
            best = &product;
        }
    }
    out.clear();
    for (std::size_t p = 0; p < prime_count; ++p) {
        if ((*best)[p / 64] >> (p % 64) & 1) out.push_back(p);
    }
    return true;
}

std::vector<std::size_t> greedy_cover(
    const std::vector<std::uint32_t>& minterms,
    const std::vector<Implicant>& primes,
    const std::vector<bool>& already_covered,
    const std::vector<bool>& already_chosen) {
    std::vector<std::size_t> chosen;
    std::vector<bool> covered = already_covered;
    std::vector<bool> used = already_chosen;
    for (;;) {
        std::size_t best = primes.size();
        std::size_t best_gain = 0;
        for (std::size_t p = 0; p < primes.size(); ++p) {
            if (used[p]) continue;
            std::size_t gain = 0;
            for (std::size_t m = 0; m < minterms.size(); ++m) {
                if (!covered[m] && primes[p].covers(minterms[m])) ++gain;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = p;
            }
        }
        if (best == primes.size()) break;
        used[best] = true;
        chosen.push_back(best);
        for (std::size_t m = 0; m < minterms.size(); ++m) {
            if (primes[best].covers(minterms[m])) covered[m] = true;
        }
    }
    return chosen;
}

}  // namespace

Dnf minimize(const Dnf& dnf) {
    dnf.validate();
    for (const auto& term : dnf.terms) {
        for (Lit lit : term) {
            if (lit == Lit::DontCare) {
                throw_error(ErrorKind::InvalidArgument,
                            "minimize expects a DontCare-free minterm list");
            }
        }
    }
    if (dnf.terms.empty()) return dnf;

    // Row indices of the covered minterms.
    std::vector<std::uint32_t> minterms;
    minterms.reserve(dnf.terms.size());
    for (const auto& term : dnf.terms) {
        std::uint32_t row = 0;
        for (std::size_t i = 1; i <= dnf.arity; ++i) {
            if (term[i - 1] == Lit::Pos) row |= 1u << (dnf.arity - i);
        }
        minterms.push_back(row);
    }
    std::sort(minterms.begin(), minterms.end());
    minterms.erase(std::unique(minterms.begin(), minterms.end()), minterms.end());

    std::vector<Implicant> start;
    start.reserve(minterms.size());
    for (auto row : minterms) start.push_back({row, 0});
    const std::vector<Implicant> primes = prime_implicants(std::move(start));

    // Essential primes first.
    std::vector<bool> chosen(primes.size(), false);
    std::vector<bool> covered(minterms.size(), false);
    for (std::size_t m = 0; m < minterms.size(); ++m) {
        std::size_t only = primes.size();
        std::size_t hits = 0;
        for (std::size_t p = 0; p < primes.size(); ++p) {
            if (primes[p].covers(minterms[m])) {
                only = p;
                if (++hits > 1) break;
            }
        }
        if (hits == 1) chosen[only] = true;
    }
    for (std::size_t m = 0; m < minterms.size(); ++m) {
        for (std::size_t p = 0; p < primes.size(); ++p) {
            if (chosen[p] && primes[p].covers(minterms[m])) {
                covered[m] = true;
                break;
            }
        }
    }

    std::vector<std::vector<std::size_t>> remaining;
    for (std::size_t m = 0; m < minterms.size(); ++m) {
        if (covered[m]) continue;
        std::vector<std::size_t> sum;
        for (std::size_t p = 0; p < primes.size(); ++p) {
            if (!chosen[p] && primes[p].covers(minterms[m])) sum.push_back(p);
        }
        remaining.push_back(std::move(sum));
    }

    if (!remaining.empty()) {
        std::vector<std::size_t> extra;
        constexpr std::size_t kPetrickBudget = 20000;
        const bool exact = dnf.arity <= 10 &&
                           petrick_cover(remaining, primes.size(), kPetrickBudget, extra);
        if (exact) {
            for (std::size_t p : extra) chosen[p] = true;
        } else {
            for (std::size_t p :
                 greedy_cover(minterms, primes, covered, chosen)) {
                chosen[p] = true;
            }
        }
    }

    Dnf out;
    out.arity = dnf.arity;
    for (std::size_t p = 0; p < primes.size(); ++p) {
        if (chosen[p]) out.terms.push_back(implicant_to_minterm(primes[p], dnf.arity));
    }
    return out;
}

}  // namespace mpskit
