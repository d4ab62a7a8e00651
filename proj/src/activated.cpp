#include "mpskit/activated.hpp"

#include <cmath>
#include <string>

#include "mpskit/error.hpp"

namespace mpskit {

void ActivatedMps::validate() const {
    core.validate();
    if (!core.label_site) {
        throw_error(ErrorKind::Shape, "activated MPS needs an explicit label leg");
    }
    if (out_weights.size() != core.output_dim()) {
        throw_error(ErrorKind::Shape,
                    "out_weights length must equal the label dimension");
    }
    if (fms.size() != core.size()) {
        throw_error(ErrorKind::Shape, "feature map count must match sites");
    }
    for (std::size_t i = 0; i < fms.size(); ++i) {
        if (fms[i].dim() != core.sites[i].phys_dim) {
            throw_error(ErrorKind::Shape,
                        "feature map dim mismatch at site " + std::to_string(i));
        }
    }
    for (double w : out_weights) {
        if (!std::isfinite(w)) {
            throw_error(ErrorKind::Numeric, "non-finite out-weight");
        }
    }
}

namespace {

// Gives the core an explicit (possibly D=1) label leg; storage layout is
// unchanged for D=1, so this is free.
Mps ensure_label(Mps core, std::optional<std::size_t> preferred) {
    if (core.label_site) return core;
    const std::size_t p =
        preferred.value_or(Mps::default_label_site(core.size()));
    core.sites[p].label_dim = 1;
    core.label_site = p;
    return core;
}

}  // namespace

ActivatedMps ActivatedMps::wrap(Mps core, std::vector<FeatureMap> fms,
                                ScaleInvariantSigmoid sigma,
                                std::vector<double> out_weights) {
    ActivatedMps a{ensure_label(std::move(core), std::nullopt), std::move(fms),
                   sigma, std::move(out_weights)};
    a.validate();
    return a;
}

std::vector<double> pre_activation(const ActivatedMps& a,
                                   const std::vector<double>& x) {
    return contract(a.core, a.fms, x);
}

double eval_activated(const ActivatedMps& a, const std::vector<double>& x) {
    const auto z = pre_activation(a, x);
    long double acc = 0.0L;
    for (std::size_t l = 0; l < z.size(); ++l) {
        acc += static_cast<long double>(a.out_weights[l]) * a.sigma.value(z[l]);
    }
    return static_cast<double>(acc);
}

ActivatedMps scale(const ActivatedMps& a, double k) {
    if (!std::isfinite(k)) {
        throw_error(ErrorKind::InvalidArgument, "scale factor must be finite");
    }
    ActivatedMps out = a;
    for (double& w : out.out_weights) w *= k;
    return out;
}

namespace {

struct BlockSumOptions {
    bool concat_phys = true;
    bool concat_label = true;
};

// Direct sum of two cores following the block rules: bond dims add on
// interior bonds (outer open bonds stay trivial via concatenation), phys and
// label legs either concatenate or stay shared. Cross-block entries are
// exact zeros.
Mps block_sum_cores(const Mps& a, const Mps& b, const BlockSumOptions& opt) {
    if (a.size() != b.size()) {
        throw_error(ErrorKind::Shape, "summands must have the same site count");
    }
    if (a.boundary != b.boundary) {
        throw_error(ErrorKind::Shape, "summands must share the boundary kind");
    }
    if (!a.label_site || !b.label_site || *a.label_site != *b.label_site) {
        throw_error(ErrorKind::Shape,
                    "summands must carry their label legs on the same site");
    }
    const std::size_t n = a.size();
    const std::size_t p = *a.label_site;
    const bool open = a.boundary == Boundary::Open;

    Mps out;
    out.boundary = a.boundary;
    out.label_site = p;
    out.sites.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const SiteTensor& sa = a.sites[i];
        const SiteTensor& sb = b.sites[i];
        const bool share_left = open && i == 0;
        const bool share_right = open && i + 1 == n;
        const bool at_label = i == p;

        if (!opt.concat_phys && sa.phys_dim != sb.phys_dim) {
            throw_error(ErrorKind::Shape, "shared-kernel sum needs equal phys dims");
        }
        if (at_label && !opt.concat_label && sa.label_dim != sb.label_dim) {
            throw_error(ErrorKind::Shape, "aligned sum needs equal label dims");
        }

        const std::size_t left =
            share_left ? 1 : sa.left_bond + sb.left_bond;
        const std::size_t right =
            share_right ? 1 : sa.right_bond + sb.right_bond;
        const std::size_t phys =
            opt.concat_phys ? sa.phys_dim + sb.phys_dim : sa.phys_dim;
        const std::size_t label =
            at_label ? (opt.concat_label ? sa.label_dim + sb.label_dim
                                         : sa.label_dim)
                     : 0;

        SiteTensor merged = SiteTensor::zeros(left, phys, right, label);
        auto copy_part = [&](const SiteTensor& src, bool second) {
            const std::size_t l_off =
                (at_label && opt.concat_label && second) ? a.sites[p].label_dim : 0;
            const std::size_t s_off = (opt.concat_phys && second) ? sa.phys_dim : 0;
            const std::size_t a_off =
                (second && !share_left) ? sa.left_bond : 0;
            const std::size_t b_off =
                (second && !share_right) ? sa.right_bond : 0;
            for (std::size_t l = 0; l < src.label_slots(); ++l) {
                for (std::size_t s = 0; s < src.phys_dim; ++s) {
                    for (std::size_t ia = 0; ia < src.left_bond; ++ia) {
                        for (std::size_t ib = 0; ib < src.right_bond; ++ib) {
                            merged.at(l + l_off, s + s_off, ia + a_off,
                                      ib + b_off) = src.at(l, s, ia, ib);
                        }
                    }
                }
            }
        };
        copy_part(sa, false);
        copy_part(sb, true);
        out.sites.push_back(std::move(merged));
    }
    out.validate();
    return out;
}

std::vector<FeatureMap> merged_maps(const ActivatedMps& a, const ActivatedMps& b,
                                    bool concat) {
    std::vector<FeatureMap> fms;
    fms.reserve(a.fms.size());
    for (std::size_t i = 0; i < a.fms.size(); ++i) {
        if (concat) {
            fms.push_back(a.fms[i].concat(b.fms[i]));
        } else {
            if (!(a.fms[i] == b.fms[i])) {
                throw_error(ErrorKind::InvalidArgument,
                            "shared-kernel sum requires identical feature maps "
                            "at site " +
                                std::to_string(i));
            }
            fms.push_back(a.fms[i]);
        }
    }
    return fms;
}

ActivatedMps add_impl(const ActivatedMps& a, const ActivatedMps& b,
                      bool shared_kernel) {
    a.validate();
    b.validate();
    if (a.input_dim() != b.input_dim()) {
        throw_error(ErrorKind::Shape, "summands must have the same site count");
    }
    if (!(a.sigma == b.sigma)) {
        throw_error(ErrorKind::Incompatible,
                    "summands must use pointwise-identical sigmoids");
    }

    ActivatedMps out{
        block_sum_cores(a.core, b.core,
                        BlockSumOptions{.concat_phys = !shared_kernel,
                                        .concat_label = true}),
        merged_maps(a, b, !shared_kernel), a.sigma, a.out_weights};
    out.out_weights.insert(out.out_weights.end(), b.out_weights.begin(),
                           b.out_weights.end());
    out.validate();
    return out;
}

}  // namespace

ActivatedMps add(const ActivatedMps& a, const ActivatedMps& b) {
    return add_impl(a, b, false);
}

ActivatedMps add_shared_kernel(const ActivatedMps& a, const ActivatedMps& b) {
    return add_impl(a, b, true);
}

ActivatedMps scale_via_c(const ActivatedMps& a, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw_error(ErrorKind::InvalidArgument,
                    "C-reparameterization supports k > 0 only (C/k would flip "
                    "sign)");
    }
    a.validate();

    if (a.sigma.form() == SigmoidForm::ScaledLogistic) {
        // k * C/(1+e^{-z}) = (kC)/(1+e^{-z}).
        ActivatedMps out = a;
        out.sigma = ScaleInvariantSigmoid::scaled_logistic(a.sigma.c() * k);
        return out;
    }

    // k/(C+e^z) = 1/(C/k + e^{z - ln k}): shift every label slot's
    // pre-activation by -ln k through a constant bond channel.
    const std::size_t n = a.input_dim();
    const std::size_t p = *a.core.label_site;
    const double shift = -std::log(k);

    Mps constant;
    constant.boundary = a.core.boundary;
    constant.label_site = p;
    for (std::size_t i = 0; i < n; ++i) {
        SiteTensor site = SiteTensor::zeros(1, 1, 1, i == p ? a.label_dim() : 0);
        for (std::size_t l = 0; l < site.label_slots(); ++l) {
            site.at(l, 0, 0, 0) = (i == p) ? shift : 1.0;
        }
        constant.sites.push_back(std::move(site));
    }

    ActivatedMps out = a;
    out.core = block_sum_cores(
        a.core, constant,
        BlockSumOptions{.concat_phys = true, .concat_label = false});
    out.sigma = ScaleInvariantSigmoid::reciprocal_shift(a.sigma.c() / k);
    out.fms.clear();
    for (std::size_t i = 0; i < n; ++i) {
        out.fms.push_back(a.fms[i].concat(FeatureMap::constant_one()));
    }
    out.validate();
    return out;
}

}  // namespace mpskit
