#include "mpskit/truth_table.hpp"

#include <string>

#include "mpskit/error.hpp"

namespace mpskit {

TruthTable TruthTable::zeros(std::size_t arity) {
    if (arity == 0 || arity > kMaxArity) {
        throw_error(ErrorKind::SizeGuard,
                    "arity must be in 1.." + std::to_string(kMaxArity));
    }
    TruthTable t;
    t.arity = arity;
    t.outputs.assign(std::size_t{1} << arity, false);
    return t;
}

std::size_t TruthTable::popcount() const {
    std::size_t n = 0;
    for (bool b : outputs) n += b ? 1 : 0;
    return n;
}

void TruthTable::validate() const {
    if (arity == 0 || arity > kMaxArity) {
        throw_error(ErrorKind::SizeGuard,
                    "arity must be in 1.." + std::to_string(kMaxArity));
    }
    if (outputs.size() != (std::size_t{1} << arity)) {
        throw_error(ErrorKind::Shape, "truth table length must be 2^arity");
    }
}

}  // namespace mpskit
