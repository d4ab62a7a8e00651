#pragma once

#include <cstdint>
#include <vector>

namespace mpskit {

// Boolean function f: {0,1}^n -> {0,1} as a flat row table. Row r encodes the
// assignment with X1 as the most significant bit: X_i = bit (n-i) of r.
struct TruthTable {
    static constexpr std::size_t kMaxArity = 24;

    std::size_t arity = 0;
    std::vector<bool> outputs;  // length 2^arity

    static TruthTable zeros(std::size_t arity);

    std::size_t rows() const { return outputs.size(); }
    bool at(std::uint32_t row) const { return outputs[row]; }

    // Bit of X_i (1-based) inside row index r.
    static int bit_of(std::uint32_t row, std::size_t i, std::size_t arity) {
        return static_cast<int>((row >> (arity - i)) & 1u);
    }

    std::size_t popcount() const;
    void validate() const;

    bool operator==(const TruthTable& other) const = default;
};

}  // namespace mpskit
