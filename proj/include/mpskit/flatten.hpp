#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpskit/activated.hpp"
#include "mpskit/mps.hpp"

namespace mpskit {

// Explicit one-hidden-layer form: weight matrix W[l][s] over the product
// feature basis Phi^s(x) = phi_1 x ... x phi_n, flat index s running over the
// multi-indices (s_1..s_n) with site 1 slowest (lexicographic).
struct FlatNetwork {
    std::size_t label_dim = 1;
    std::size_t flat_dim = 1;          // S = prod of site dims
    std::vector<std::size_t> site_dims;
    std::vector<double> weights;       // row-major, label_dim x flat_dim
    std::vector<FeatureMap> fms;
    // Present when flattened from an activated model.
    std::optional<ScaleInvariantSigmoid> sigma;
    std::vector<double> out_weights;

    double weight(std::size_t l, std::size_t s) const {
        return weights[l * flat_dim + s];
    }
    void validate() const;
};

// Canonical flat-index bijection (site 1 slowest).
std::size_t flat_index(const std::vector<std::size_t>& dims,
                       const std::vector<std::size_t>& multi);
std::vector<std::size_t> multi_index(const std::vector<std::size_t>& dims,
                                     std::size_t flat);

// Contracts every bond index; guarded at S <= 2^20. The flat weights satisfy
// W[l][s] = full bond contraction of the site tensors at phys multi-index s.
FlatNetwork flatten(const Mps& mps, const std::vector<FeatureMap>& fms);
FlatNetwork flatten(const ActivatedMps& a);

// Product-basis vector Phi^s(x), Kronecker order matching flat_index.
std::vector<double> product_features(const std::vector<FeatureMap>& fms,
                                     const std::vector<double>& x);

// Pre-activation z_l(x) = sum_s W[l][s] Phi^s(x).
std::vector<double> pre_activation_flat(const FlatNetwork& f,
                                        const std::vector<double>& x);

// Full evaluation: plain networks return the single pre-activation; activated
// ones apply sigma and the out-weights.
double evaluate_flat(const FlatNetwork& f, const std::vector<double>& x);

// Human-readable monomial per kernel slot ("x1*x3", "(1-x2)", "1");
// defined for AffineOne / BinaryIndicator maps only.
std::vector<std::string> named_kernel(const FlatNetwork& f);

}  // namespace mpskit
