#pragma once

#include <cmath>
#include <vector>

#include "mpskit/activated.hpp"
#include "mpskit/mps.hpp"
#include "mpskit/rng.hpp"

namespace mpskit::test {

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct RandomMps {
    Mps mps;
    std::vector<FeatureMap> fms;
};

inline FeatureMap random_feature_map(Rng& rng) {
    switch (rng.below(4)) {
        case 0: return FeatureMap::binary_indicator();
        case 1: return FeatureMap::affine_one();
        case 2: return FeatureMap::trig_pair();
        default: {
            std::vector<std::vector<double>> rows;
            const std::size_t d = 1 + rng.below(3);
            for (std::size_t r = 0; r < d; ++r) {
                std::vector<double> row(FeatureMap::kBasisSize, 0.0);
                for (auto& c : row) c = rng.uniform(-1.0, 1.0);
                rows.push_back(std::move(row));
            }
            return FeatureMap::custom(std::move(rows));
        }
    }
}

inline RandomMps random_mps(Rng& rng, std::size_t n, std::size_t chi_max,
                            std::size_t label_dim = 0,
                            Boundary boundary = Boundary::Open,
                            bool mixed_maps = true, std::size_t fixed_d = 2) {
    RandomMps out;
    out.mps.boundary = boundary;
    std::vector<std::size_t> bonds(n + 1, 1);
    if (boundary == Boundary::Periodic) {
        bonds[0] = bonds[n] = 1 + rng.below(chi_max);
    }
    for (std::size_t i = 1; i < n; ++i) bonds[i] = 1 + rng.below(chi_max);

    const std::size_t label_site = label_dim > 0 ? Mps::default_label_site(n)
                                                 : n;
    for (std::size_t i = 0; i < n; ++i) {
        const FeatureMap fm =
            mixed_maps ? random_feature_map(rng)
                       : (fixed_d == 2 ? FeatureMap::binary_indicator()
                                       : FeatureMap::custom({{1, 0, 0, 0, 0}}));
        SiteTensor site = SiteTensor::zeros(bonds[i], fm.dim(), bonds[i + 1],
                                            i == label_site ? label_dim : 0);
        for (auto& v : site.data) v = rng.uniform(-1.0, 1.0);
        out.mps.sites.push_back(std::move(site));
        out.fms.push_back(fm);
    }
    if (label_dim > 0) out.mps.label_site = label_site;
    return out;
}

// Independent oracle: explicit sum over every phys multi-index of the bond
// product times the product-feature entry. Never reuses the library's
// contraction path.
inline std::vector<double> contract_bruteforce(const Mps& mps,
                                               const std::vector<FeatureMap>& fms,
                                               const std::vector<double>& x) {
    const std::size_t n = mps.size();
    const std::size_t out_dim = mps.output_dim();
    const std::size_t p = mps.label_site.value_or(0);
    const bool labelled = mps.label_site.has_value();

    std::vector<std::vector<double>> phis(n);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        phis[i] = fms[i].eval(x[i]);
        total *= mps.sites[i].phys_dim;
    }

    std::vector<double> out(out_dim, 0.0);
    std::vector<std::size_t> s(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t i = n; i-- > 0;) {
            s[i] = rem % mps.sites[i].phys_dim;
            rem /= mps.sites[i].phys_dim;
        }
        double coeff = 1.0;
        for (std::size_t i = 0; i < n; ++i) coeff *= phis[i][s[i]];
        for (std::size_t l = 0; l < out_dim; ++l) {
            // Bond product of the selected slices.
            const std::size_t chi0 = mps.sites[0].left_bond;
            std::vector<double> m(chi0 * chi0, 0.0);
            for (std::size_t i2 = 0; i2 < chi0; ++i2) m[i2 * chi0 + i2] = 1.0;
            std::size_t cols = chi0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& site = mps.sites[i];
                const std::size_t lsel = (labelled && i == p) ? l : 0;
                std::vector<double> next(chi0 * site.right_bond, 0.0);
                for (std::size_t a = 0; a < chi0; ++a) {
                    for (std::size_t b = 0; b < site.right_bond; ++b) {
                        double acc = 0.0;
                        for (std::size_t kk = 0; kk < site.left_bond; ++kk) {
                            acc += m[a * cols + kk] * site.at(lsel, s[i], kk, b);
                        }
                        next[a * site.right_bond + b] = acc;
                    }
                }
                m = std::move(next);
                cols = site.right_bond;
            }
            double val = 0.0;
            if (mps.boundary == Boundary::Open) {
                val = m[0];
            } else {
                for (std::size_t i2 = 0; i2 < chi0; ++i2) val += m[i2 * cols + i2];
            }
            out[l] += coeff * val;
        }
    }
    return out;
}

// Second route: contract the chain right to left.
inline std::vector<double> contract_right_to_left(
    const Mps& mps, const std::vector<FeatureMap>& fms,
    const std::vector<double>& x) {
    const std::size_t n = mps.size();
    const std::size_t out_dim = mps.output_dim();
    const std::size_t p = mps.label_site.value_or(0);
    const bool labelled = mps.label_site.has_value();
    const std::size_t chi0 = mps.sites.front().left_bond;

    std::vector<double> out(out_dim, 0.0);
    for (std::size_t l = 0; l < out_dim; ++l) {
        // Accumulate M_i ... M_{n-1} from the right as a full matrix.
        std::vector<double> acc;
        std::size_t acc_rows = 0, acc_cols = 0;
        for (std::size_t i = n; i-- > 0;) {
            const auto& site = mps.sites[i];
            const auto phi = fms[i].eval(x[i]);
            std::vector<double> m(site.left_bond * site.right_bond, 0.0);
            const std::size_t lsel = (labelled && i == p) ? l : 0;
            for (std::size_t sphys = 0; sphys < site.phys_dim; ++sphys) {
                for (std::size_t a = 0; a < site.left_bond; ++a) {
                    for (std::size_t b = 0; b < site.right_bond; ++b) {
                        m[a * site.right_bond + b] +=
                            phi[sphys] * site.at(lsel, sphys, a, b);
                    }
                }
            }
            if (acc.empty()) {
                acc = std::move(m);
                acc_rows = site.left_bond;
                acc_cols = site.right_bond;
            } else {
                std::vector<double> next(site.left_bond * acc_cols, 0.0);
                for (std::size_t a = 0; a < site.left_bond; ++a) {
                    for (std::size_t c = 0; c < acc_cols; ++c) {
                        double v = 0.0;
                        for (std::size_t b = 0; b < site.right_bond; ++b) {
                            v += m[a * site.right_bond + b] * acc[b * acc_cols + c];
                        }
                        next[a * acc_cols + c] = v;
                    }
                }
                acc = std::move(next);
                acc_rows = site.left_bond;
            }
        }
        if (mps.boundary == Boundary::Open) {
            out[l] = acc[0];
        } else {
            double tr = 0.0;
            for (std::size_t i2 = 0; i2 < chi0; ++i2) tr += acc[i2 * acc_cols + i2];
            out[l] = tr;
        }
        (void)acc_rows;
    }
    return out;
}

inline ActivatedMps random_activated_instance(Rng& rng, std::size_t n,
                                              std::size_t chi_max,
                                              std::size_t label_dim,
                                              bool mixed_maps = true) {
    RandomMps core = random_mps(rng, n, chi_max, label_dim, Boundary::Open,
                                mixed_maps);
    std::vector<double> w(label_dim);
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    const auto sigma = rng.coin()
                           ? ScaleInvariantSigmoid::reciprocal_shift(
                                 0.5 + rng.uniform01())
                           : ScaleInvariantSigmoid::scaled_logistic(
                                 rng.uniform(0.5, 2.0));
    return ActivatedMps{std::move(core.mps), std::move(core.fms), sigma,
                        std::move(w)};
}

}  // namespace mpskit::test
