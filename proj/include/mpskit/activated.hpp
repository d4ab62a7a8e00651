#pragma once

#include <vector>

#include "mpskit/mps.hpp"
#include "mpskit/sigmoid.hpp"

namespace mpskit {

// Modified MPS: out_weights[l] * sigma(core pre-activation at label slot l),
// summed over l. The out-weight vector carries scalar multiplication, so the
// sigmoid parameters stay interpretable.
struct ActivatedMps {
    Mps core;  // carries an explicit label leg of dim D >= 1
    std::vector<FeatureMap> fms;
    ScaleInvariantSigmoid sigma = ScaleInvariantSigmoid::scaled_logistic(1.0);
    std::vector<double> out_weights;  // length D

    std::size_t label_dim() const { return core.output_dim(); }
    std::size_t input_dim() const { return core.size(); }

    void validate() const;

    // Wraps a plain MPS; a missing label leg is materialized with D=1 at the
    // default interior site (data unchanged).
    static ActivatedMps wrap(Mps core, std::vector<FeatureMap> fms,
                             ScaleInvariantSigmoid sigma,
                             std::vector<double> out_weights);
};

// Pre-activation vector z_l(x) of the core.
std::vector<double> pre_activation(const ActivatedMps& a,
                                   const std::vector<double>& x);

// sum_l W_l * sigma(z_l(x)); overflow saturates to the sigmoid limits.
double eval_activated(const ActivatedMps& a, const std::vector<double>& x);

// k * f, carried by the out-weights. Any real k.
ActivatedMps scale(const ActivatedMps& a, double k);

// k * f via the C-reparameterization (k/(C+e^z) = 1/(C/k + e^{z - ln k}));
// requires k > 0. The pre-activation shift rides on an extra constant bond
// channel. Must agree pointwise with scale().
ActivatedMps scale_via_c(const ActivatedMps& a, double k);

// Block sum: phys dims, interior bonds and label dims concatenate; feature
// maps concatenate into a Custom; entries mixing the two blocks are exact
// zeros. eval(add(a,b), x) == eval(a,x) + eval(b,x).
ActivatedMps add(const ActivatedMps& a, const ActivatedMps& b);

// Same function as add() for sitewise-identical feature maps; keeps the phys
// dims and direct-sums bonds only.
ActivatedMps add_shared_kernel(const ActivatedMps& a, const ActivatedMps& b);

}  // namespace mpskit
