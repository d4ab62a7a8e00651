#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mpskit/feature_map.hpp"

namespace mpskit {

// Order-3 site tensor A^{s}_{ab}, optionally carrying a label leg l.
// Data is row-major over (label, phys, left, right); a label_dim of 0 means
// no label leg and is stored like label_dim 1.
struct SiteTensor {
    std::size_t left_bond = 1;
    std::size_t phys_dim = 1;
    std::size_t right_bond = 1;
    std::size_t label_dim = 0;  // 0 = no label leg
    std::vector<double> data;

    static SiteTensor zeros(std::size_t left, std::size_t phys, std::size_t right,
                            std::size_t label = 0);

    std::size_t label_slots() const { return label_dim == 0 ? 1 : label_dim; }
    std::size_t expected_size() const {
        return label_slots() * phys_dim * left_bond * right_bond;
    }

    double& at(std::size_t l, std::size_t s, std::size_t a, std::size_t b) {
        return data[((l * phys_dim + s) * left_bond + a) * right_bond + b];
    }
    double at(std::size_t l, std::size_t s, std::size_t a, std::size_t b) const {
        return data[((l * phys_dim + s) * left_bond + a) * right_bond + b];
    }

    void validate() const;
    bool integer_valued() const;
};

enum class Boundary { Open, Periodic };

struct Mps {
    std::vector<SiteTensor> sites;
    Boundary boundary = Boundary::Open;
    std::optional<std::size_t> label_site;  // index of the site with the l leg

    std::size_t size() const { return sites.size(); }
    std::size_t label_dim() const {
        return label_site ? sites[*label_site].label_dim : 0;
    }
    // Output width D: 1 when there is no label leg.
    std::size_t output_dim() const {
        const std::size_t d = label_dim();
        return d == 0 ? 1 : d;
    }

    // Checks bond matching, boundary conditions, the single-label-leg rule
    // and entry finiteness. Throws Error(Shape) / Error(Numeric).
    void validate() const;

    bool integer_valued() const;

    // Default position for the label leg: interior site ceil(n/2), 0-based.
    static std::size_t default_label_site(std::size_t n) { return (n - 1) / 2; }
};

// Evaluates Psi^l(x) by contracting each site with its feature vector and
// multiplying the resulting bond matrices left to right. Periodic chains take
// the trace. Never materializes the d^n product basis. Boolean inputs against
// integer tensors are routed through exact integer arithmetic.
std::vector<double> contract(const Mps& mps, const std::vector<FeatureMap>& fms,
                             const std::vector<double>& x);

std::vector<std::vector<double>> contract_batch(
    const Mps& mps, const std::vector<FeatureMap>& fms,
    const std::vector<std::vector<double>>& xs);

// Exact integer evaluation on a bit vector; requires integer-valued tensors
// and feature maps that are integer on bits. Throws Error(Numeric) on
// overflow or non-integer structures.
std::vector<std::int64_t> contract_bits(const Mps& mps,
                                        const std::vector<FeatureMap>& fms,
                                        const std::vector<int>& bits);

}  // namespace mpskit
