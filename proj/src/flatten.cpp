#include "mpskit/flatten.hpp"

#include <cmath>
#include <string>

#include "mpskit/error.hpp"

namespace mpskit {

namespace {

constexpr std::size_t kFlatLimit = std::size_t{1} << 20;

}  // namespace

void FlatNetwork::validate() const {
    std::size_t s = 1;
    for (std::size_t d : site_dims) s *= d;
    if (s != flat_dim || weights.size() != label_dim * flat_dim) {
        throw_error(ErrorKind::Shape, "flat network dimensions are inconsistent");
    }
    for (double w : weights) {
        if (!std::isfinite(w)) {
            throw_error(ErrorKind::Numeric, "non-finite flat weight");
        }
    }
    if (!out_weights.empty() && out_weights.size() != label_dim) {
        throw_error(ErrorKind::Shape, "out_weights length must equal label dim");
    }
}

std::size_t flat_index(const std::vector<std::size_t>& dims,
                       const std::vector<std::size_t>& multi) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        flat = flat * dims[i] + multi[i];
    }
    return flat;
}

std::vector<std::size_t> multi_index(const std::vector<std::size_t>& dims,
                                     std::size_t flat) {
    std::vector<std::size_t> multi(dims.size(), 0);
    for (std::size_t i = dims.size(); i-- > 0;) {
        multi[i] = flat % dims[i];
        flat /= dims[i];
    }
    return multi;
}

FlatNetwork flatten(const Mps& mps, const std::vector<FeatureMap>& fms) {
    mps.validate();
    if (fms.size() != mps.size()) {
        throw_error(ErrorKind::Shape, "feature map count must match sites");
    }

    std::size_t flat_dim = 1;
    std::vector<std::size_t> dims;
    dims.reserve(mps.size());
    for (const auto& site : mps.sites) {
        if (flat_dim > kFlatLimit / site.phys_dim) {
            throw_error(ErrorKind::SizeGuard,
                        "product feature space exceeds the 2^20 limit");
        }
        flat_dim *= site.phys_dim;
        dims.push_back(site.phys_dim);
    }
    if (flat_dim > kFlatLimit) {
        throw_error(ErrorKind::SizeGuard,
                    "product feature space of size " + std::to_string(flat_dim) +
                        " exceeds the 2^20 limit");
    }

    const std::size_t chi0 = mps.sites.front().left_bond;
    const std::size_t out_dim = mps.output_dim();
    const std::size_t label_pos = mps.label_site.value_or(mps.size());

    // Left-to-right sweep over flat prefixes; each prefix carries a
    // chi0 x chi_r transfer matrix (per label slot once past the label site).
    std::size_t prefixes = 1;
    std::size_t lslots = 1;
    std::size_t cols = chi0;
    std::vector<double> table(chi0 * chi0, 0.0);
    for (std::size_t i = 0; i < chi0; ++i) table[i * chi0 + i] = 1.0;

    for (std::size_t i = 0; i < mps.size(); ++i) {
        const SiteTensor& site = mps.sites[i];
        const bool at_label = i == label_pos;
        const std::size_t new_l = at_label ? out_dim : lslots;
        const std::size_t d = site.phys_dim;
        const std::size_t next_cols = site.right_bond;

        const std::size_t next_size = prefixes * d * new_l * chi0 * next_cols;
        if (next_size > (std::size_t{1} << 24)) {
            throw_error(ErrorKind::SizeGuard,
                        "flatten working set exceeds the size limit");
        }
        std::vector<double> next(next_size, 0.0);
        for (std::size_t pre = 0; pre < prefixes; ++pre) {
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t lo = 0; lo < new_l; ++lo) {
                    const std::size_t lin = at_label ? 0 : lo;
                    const std::size_t lsite = at_label ? lo : 0;
                    const double* src =
                        table.data() + (pre * lslots + lin) * chi0 * cols;
                    double* dst = next.data() +
                                  (((pre * d + s) * new_l + lo) * chi0) * next_cols;
                    const double* a =
                        site.data.data() +
                        ((lsite * d + s) * site.left_bond) * next_cols;
                    for (std::size_t r = 0; r < chi0; ++r) {
                        for (std::size_t c = 0; c < next_cols; ++c) {
                            long double acc = 0.0L;
                            for (std::size_t k = 0; k < cols; ++k) {
                                acc += static_cast<long double>(src[r * cols + k]) *
                                       a[k * next_cols + c];
                            }
                            dst[r * next_cols + c] = static_cast<double>(acc);
                        }
                    }
                }
            }
        }
        table = std::move(next);
        prefixes *= d;
        lslots = new_l;
        cols = next_cols;
    }

    FlatNetwork f;
    f.label_dim = out_dim;
    f.flat_dim = flat_dim;
    f.site_dims = std::move(dims);
    f.fms = fms;
    f.weights.assign(out_dim * flat_dim, 0.0);
    for (std::size_t s = 0; s < flat_dim; ++s) {
        for (std::size_t l = 0; l < out_dim; ++l) {
            const double* m = table.data() + (s * lslots + (lslots == 1 ? 0 : l)) *
                                                 chi0 * cols;
            double value = 0.0;
            if (mps.boundary == Boundary::Open) {
                value = m[0];
            } else {
                long double tr = 0.0L;
                for (std::size_t r = 0; r < chi0; ++r) tr += m[r * cols + r];
                value = static_cast<double>(tr);
            }
            f.weights[l * flat_dim + s] = value;
        }
    }
    f.validate();
    return f;
}

FlatNetwork flatten(const ActivatedMps& a) {
    a.validate();
    FlatNetwork f = flatten(a.core, a.fms);
    f.sigma = a.sigma;
    f.out_weights = a.out_weights;
    return f;
}

std::vector<double> product_features(const std::vector<FeatureMap>& fms,
                                     const std::vector<double>& x) {
    if (fms.size() != x.size()) {
        throw_error(ErrorKind::Shape, "input length must match feature maps");
    }
    std::vector<double> phi{1.0};
    for (std::size_t i = 0; i < fms.size(); ++i) {
        const auto site_phi = fms[i].eval(x[i]);
        std::vector<double> next(phi.size() * site_phi.size());
        for (std::size_t a = 0; a < phi.size(); ++a) {
            for (std::size_t b = 0; b < site_phi.size(); ++b) {
                next[a * site_phi.size() + b] = phi[a] * site_phi[b];
            }
        }
        phi = std::move(next);
    }
    return phi;
}

std::vector<double> pre_activation_flat(const FlatNetwork& f,
                                        const std::vector<double>& x) {
    f.validate();
    const auto phi = product_features(f.fms, x);
    if (phi.size() != f.flat_dim) {
        throw_error(ErrorKind::Shape, "feature dims do not match flat network");
    }
    std::vector<double> z(f.label_dim, 0.0);
    for (std::size_t l = 0; l < f.label_dim; ++l) {
        long double acc = 0.0L;
        const double* row = f.weights.data() + l * f.flat_dim;
        for (std::size_t s = 0; s < f.flat_dim; ++s) {
            acc += static_cast<long double>(row[s]) * phi[s];
        }
        z[l] = static_cast<double>(acc);
    }
    return z;
}

double evaluate_flat(const FlatNetwork& f, const std::vector<double>& x) {
    const auto z = pre_activation_flat(f, x);
    if (!f.sigma) {
        if (z.size() != 1) {
            throw_error(ErrorKind::Shape,
                        "plain flat network with D > 1 has no scalar value; "
                        "use pre_activation_flat");
        }
        return z[0];
    }
    long double acc = 0.0L;
    for (std::size_t l = 0; l < z.size(); ++l) {
        const double w = f.out_weights.empty() ? 1.0 : f.out_weights[l];
        acc += static_cast<long double>(w) * f.sigma->value(z[l]);
    }
    return static_cast<double>(acc);
}

std::vector<std::string> named_kernel(const FlatNetwork& f) {
    for (const auto& fm : f.fms) {
        if (fm.kind() != FeatureKind::AffineOne &&
            fm.kind() != FeatureKind::BinaryIndicator) {
            throw_error(ErrorKind::Incompatible,
                        "kernel naming is defined for AffineOne and "
                        "BinaryIndicator maps only");
        }
    }
    std::vector<std::string> names;
    names.reserve(f.flat_dim);
    for (std::size_t s = 0; s < f.flat_dim; ++s) {
        const auto multi = multi_index(f.site_dims, s);
        std::string name;
        for (std::size_t i = 0; i < multi.size(); ++i) {
            std::string factor;
            if (multi[i] == 0) {
                factor = "x" + std::to_string(i + 1);
            } else if (f.fms[i].kind() == FeatureKind::BinaryIndicator) {
                factor = "(1-x" + std::to_string(i + 1) + ")";
            } else {
                continue;  // AffineOne second slot is the constant 1
            }
            if (!name.empty()) name += "*";
            name += factor;
        }
        names.push_back(name.empty() ? "1" : name);
    }
    return names;
}

}  // namespace mpskit
