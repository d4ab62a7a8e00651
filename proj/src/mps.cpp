#include "mpskit/mps.hpp"

#include <cmath>
#include <string>

#include "mpskit/error.hpp"
#include "mpskit/parallel.hpp"

namespace mpskit {

SiteTensor SiteTensor::zeros(std::size_t left, std::size_t phys,
                             std::size_t right, std::size_t label) {
    SiteTensor t;
    t.left_bond = left;
    t.phys_dim = phys;
    t.right_bond = right;
    t.label_dim = label;
    t.data.assign(t.expected_size(), 0.0);
    return t;
}

void SiteTensor::validate() const {
    if (left_bond == 0 || phys_dim == 0 || right_bond == 0) {
        throw_error(ErrorKind::Shape, "site tensor dimensions must be positive");
    }
    if (data.size() != expected_size()) {
        throw_error(ErrorKind::Shape,
                    "site tensor data length " + std::to_string(data.size()) +
                        " does not match dims (expected " +
                        std::to_string(expected_size()) + ")");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw_error(ErrorKind::Numeric, "site tensor holds non-finite value");
        }
    }
}

bool SiteTensor::integer_valued() const {
    for (double v : data) {
        if (v != std::nearbyint(v)) return false;
    }
    return true;
}

void Mps::validate() const {
    if (sites.empty()) {
        throw_error(ErrorKind::Shape, "MPS must have at least one site");
    }
    const std::size_t n = sites.size();
    for (const auto& site : sites) site.validate();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (sites[i].right_bond != sites[i + 1].left_bond) {
            throw_error(ErrorKind::Shape,
                        "bond mismatch between sites " + std::to_string(i) +
                            " and " + std::to_string(i + 1));
        }
    }
    if (boundary == Boundary::Open) {
        if (sites.front().left_bond != 1 || sites.back().right_bond != 1) {
            throw_error(ErrorKind::Shape,
                        "open boundary requires trivial outer bonds");
        }
    } else if (sites.front().left_bond != sites.back().right_bond) {
        throw_error(ErrorKind::Shape,
                    "periodic boundary requires matching outer bonds");
    }
    std::size_t labelled = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sites[i].label_dim > 0) {
            ++labelled;
            if (!label_site || *label_site != i) {
                throw_error(ErrorKind::Shape,
                            "label_site does not point at the labelled site");
            }
        }
    }
    if (labelled > 1) {
        throw_error(ErrorKind::Shape, "at most one site may carry the label leg");
    }
    if (label_site && (*label_site >= n || sites[*label_site].label_dim == 0)) {
        throw_error(ErrorKind::Shape, "label_site points at an unlabelled site");
    }
}

bool Mps::integer_valued() const {
    for (const auto& site : sites) {
        if (!site.integer_valued()) return false;
    }
    return true;
}

namespace {

// chi_l x chi_r matrix for one site at fixed label slot, phys contracted
// against phi.
std::vector<double> site_matrix(const SiteTensor& site,
                                const std::vector<double>& phi, std::size_t l) {
    std::vector<double> m(site.left_bond * site.right_bond, 0.0);
    for (std::size_t s = 0; s < site.phys_dim; ++s) {
        const double w = phi[s];
        if (w == 0.0) continue;
        const double* slice =
            site.data.data() +
            ((l * site.phys_dim + s) * site.left_bond) * site.right_bond;
        for (std::size_t ab = 0; ab < m.size(); ++ab) m[ab] += w * slice[ab];
    }
    return m;
}

// row vector (1 x cols) times matrix (cols x rows_out); long double accumulate.
std::vector<double> vec_mat(const std::vector<double>& v,
                            const std::vector<double>& m, std::size_t rows,
                            std::size_t cols) {
    std::vector<double> out(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < rows; ++i) {
            acc += static_cast<long double>(v[i]) * m[i * cols + j];
        }
        out[j] = static_cast<double>(acc);
    }
    return out;
}

std::vector<double> mat_vec(const std::vector<double>& m,
                            const std::vector<double>& v, std::size_t rows,
                            std::size_t cols) {
    std::vector<double> out(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += static_cast<long double>(m[i * cols + j]) * v[j];
        }
        out[i] = static_cast<double>(acc);
    }
    return out;
}

std::vector<double> mat_mat(const std::vector<double>& a,
                            const std::vector<double>& b, std::size_t rows,
                            std::size_t mid, std::size_t cols) {
    std::vector<double> out(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < mid; ++k) {
                acc += static_cast<long double>(a[i * mid + k]) * b[k * cols + j];
            }
            out[i * cols + j] = static_cast<double>(acc);
        }
    }
    return out;
}

void check_inputs(const Mps& mps, const std::vector<FeatureMap>& fms,
                  const std::vector<double>& x) {
    const std::size_t n = mps.size();
    if (fms.size() != n) {
        throw_error(ErrorKind::Shape, "feature map count does not match sites");
    }
    if (x.size() != n) {
        throw_error(ErrorKind::Shape,
                    "input vector length " + std::to_string(x.size()) +
                        " does not match site count " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (fms[i].dim() != mps.sites[i].phys_dim) {
            throw_error(ErrorKind::Shape,
                        "feature map dim mismatch at site " + std::to_string(i));
        }
        if (!std::isfinite(x[i])) {
            throw_error(ErrorKind::Numeric, "non-finite input component");
        }
    }
}

bool boolean_input(const std::vector<double>& x) {
    for (double v : x) {
        if (v != 0.0 && v != 1.0) return false;
    }
    return true;
}

std::vector<double> contract_real(const Mps& mps,
                                  const std::vector<FeatureMap>& fms,
                                  const std::vector<double>& x) {
    const std::size_t n = mps.size();
    const std::size_t p = mps.label_site.value_or(0);
    const bool labelled = mps.label_site.has_value();
    const std::size_t out_dim = mps.output_dim();

    if (mps.boundary == Boundary::Open) {
        // Row sweep into the label site from the left, column sweep from the
        // right, then one bilinear form per label slot.
        std::vector<double> left{1.0};
        for (std::size_t i = 0; i < p; ++i) {
            const auto m = site_matrix(mps.sites[i], fms[i].eval(x[i]), 0);
            left = vec_mat(left, m, mps.sites[i].left_bond,
                           mps.sites[i].right_bond);
        }
        std::vector<double> right{1.0};
        for (std::size_t i = n; i-- > p + 1;) {
            const auto m = site_matrix(mps.sites[i], fms[i].eval(x[i]), 0);
            right =
                mat_vec(m, right, mps.sites[i].left_bond, mps.sites[i].right_bond);
        }
        const auto& pivot = mps.sites[p];
        const auto phi = fms[p].eval(x[p]);
        std::vector<double> out(out_dim, 0.0);
        for (std::size_t l = 0; l < out_dim; ++l) {
            const auto m =
                site_matrix(pivot, phi, labelled ? l : 0);
            const auto mv = mat_vec(m, right, pivot.left_bond, pivot.right_bond);
            long double acc = 0.0L;
            for (std::size_t a = 0; a < pivot.left_bond; ++a) {
                acc += static_cast<long double>(left[a]) * mv[a];
            }
            out[l] = static_cast<double>(acc);
        }
        return out;
    }

    // Periodic: full matrix products, then a trace per label slot.
    const std::size_t chi0 = mps.sites.front().left_bond;
    std::vector<double> out(out_dim, 0.0);
    for (std::size_t l = 0; l < out_dim; ++l) {
        std::vector<double> prod(chi0 * chi0, 0.0);
        for (std::size_t i = 0; i < chi0; ++i) prod[i * chi0 + i] = 1.0;
        std::size_t prod_cols = chi0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto m = site_matrix(mps.sites[i], fms[i].eval(x[i]),
                                       (labelled && i == p) ? l : 0);
            prod = mat_mat(prod, m, chi0, mps.sites[i].left_bond,
                           mps.sites[i].right_bond);
            prod_cols = mps.sites[i].right_bond;
        }
        long double tr = 0.0L;
        for (std::size_t i = 0; i < chi0; ++i) tr += prod[i * prod_cols + i];
        out[l] = static_cast<double>(tr);
    }
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw_error(ErrorKind::Numeric, "integer contraction overflow");
    }
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw_error(ErrorKind::Numeric, "integer contraction overflow");
    }
    return r;
}

std::vector<std::int64_t> site_matrix_int(const SiteTensor& site,
                                          const std::vector<std::int64_t>& phi,
                                          std::size_t l) {
    std::vector<std::int64_t> m(site.left_bond * site.right_bond, 0);
    for (std::size_t s = 0; s < site.phys_dim; ++s) {
        if (phi[s] == 0) continue;
        const double* slice =
            site.data.data() +
            ((l * site.phys_dim + s) * site.left_bond) * site.right_bond;
        for (std::size_t ab = 0; ab < m.size(); ++ab) {
            m[ab] = checked_add(
                m[ab], checked_mul(phi[s], static_cast<std::int64_t>(slice[ab])));
        }
    }
    return m;
}

}  // namespace

std::vector<std::int64_t> contract_bits(const Mps& mps,
                                        const std::vector<FeatureMap>& fms,
                                        const std::vector<int>& bits) {
    const std::size_t n = mps.size();
    if (fms.size() != n || bits.size() != n) {
        throw_error(ErrorKind::Shape, "bit vector / feature map count mismatch");
    }
    for (int b : bits) {
        if (b != 0 && b != 1) {
            throw_error(ErrorKind::InvalidArgument, "inputs must be bits");
        }
    }
    if (!mps.integer_valued()) {
        throw_error(ErrorKind::Numeric,
                    "integer contraction requires integer-valued tensors");
    }

    const std::size_t p = mps.label_site.value_or(0);
    const bool labelled = mps.label_site.has_value();
    const std::size_t out_dim = mps.output_dim();
    std::vector<std::int64_t> out(out_dim, 0);

    if (mps.boundary == Boundary::Open) {
        std::vector<std::int64_t> left{1};
        for (std::size_t i = 0; i < p; ++i) {
            const auto m = site_matrix_int(mps.sites[i], fms[i].eval_bit(bits[i]), 0);
            const std::size_t rows = mps.sites[i].left_bond;
            const std::size_t cols = mps.sites[i].right_bond;
            std::vector<std::int64_t> next(cols, 0);
            for (std::size_t j = 0; j < cols; ++j) {
                std::int64_t acc = 0;
                for (std::size_t a = 0; a < rows; ++a) {
                    acc = checked_add(acc, checked_mul(left[a], m[a * cols + j]));
                }
                next[j] = acc;
            }
            left = std::move(next);
        }
        std::vector<std::int64_t> right{1};
        for (std::size_t i = n; i-- > p + 1;) {
            const auto m = site_matrix_int(mps.sites[i], fms[i].eval_bit(bits[i]), 0);
            const std::size_t rows = mps.sites[i].left_bond;
            const std::size_t cols = mps.sites[i].right_bond;
            std::vector<std::int64_t> next(rows, 0);
            for (std::size_t a = 0; a < rows; ++a) {
                std::int64_t acc = 0;
                for (std::size_t j = 0; j < cols; ++j) {
                    acc = checked_add(acc, checked_mul(m[a * cols + j], right[j]));
                }
                next[a] = acc;
            }
            right = std::move(next);
        }
        const auto& pivot = mps.sites[p];
        const auto phi = fms[p].eval_bit(bits[p]);
        for (std::size_t l = 0; l < out_dim; ++l) {
            const auto m = site_matrix_int(pivot, phi, labelled ? l : 0);
            std::int64_t acc = 0;
            for (std::size_t a = 0; a < pivot.left_bond; ++a) {
                std::int64_t row = 0;
                for (std::size_t b = 0; b < pivot.right_bond; ++b) {
                    row = checked_add(
                        row, checked_mul(m[a * pivot.right_bond + b], right[b]));
                }
                acc = checked_add(acc, checked_mul(left[a], row));
            }
            out[l] = acc;
        }
        return out;
    }

    const std::size_t chi0 = mps.sites.front().left_bond;
    for (std::size_t l = 0; l < out_dim; ++l) {
        std::vector<std::int64_t> prod(chi0 * chi0, 0);
        for (std::size_t i = 0; i < chi0; ++i) prod[i * chi0 + i] = 1;
        std::size_t cols = chi0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto m = site_matrix_int(mps.sites[i], fms[i].eval_bit(bits[i]),
                                           (labelled && i == p) ? l : 0);
            const std::size_t mid = mps.sites[i].left_bond;
            const std::size_t mcols = mps.sites[i].right_bond;
            std::vector<std::int64_t> next(chi0 * mcols, 0);
            for (std::size_t a = 0; a < chi0; ++a) {
                for (std::size_t j = 0; j < mcols; ++j) {
                    std::int64_t acc = 0;
                    for (std::size_t k = 0; k < mid; ++k) {
                        acc = checked_add(
                            acc, checked_mul(prod[a * cols + k], m[k * mcols + j]));
                    }
                    next[a * mcols + j] = acc;
                }
            }
            prod = std::move(next);
            cols = mcols;
        }
        std::int64_t tr = 0;
        for (std::size_t i = 0; i < chi0; ++i) {
            tr = checked_add(tr, prod[i * cols + i]);
        }
        out[l] = tr;
    }
    return out;
}

std::vector<double> contract(const Mps& mps, const std::vector<FeatureMap>& fms,
                             const std::vector<double>& x) {
    mps.validate();
    check_inputs(mps, fms, x);

    // Exact route for gate verification: bit inputs + integer structures.
    if (boolean_input(x) && mps.integer_valued()) {
        bool exact = true;
        for (const auto& fm : fms) {
            if (!fm.integer_on_bits()) {
                exact = false;
                break;
            }
        }
        if (exact) {
            std::vector<int> bits(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                bits[i] = x[i] == 1.0 ? 1 : 0;
            }
            const auto ints = contract_bits(mps, fms, bits);
            return std::vector<double>(ints.begin(), ints.end());
        }
    }
    return contract_real(mps, fms, x);
}

std::vector<std::vector<double>> contract_batch(
    const Mps& mps, const std::vector<FeatureMap>& fms,
    const std::vector<std::vector<double>>& xs) {
    std::vector<std::vector<double>> out(xs.size());
    if (xs.empty()) return out;

    std::vector<std::string> errors(xs.size());
    std::vector<ErrorKind> kinds(xs.size(), ErrorKind::Numeric);
    std::vector<char> failed(xs.size(), 0);
    auto run_one = [&](std::size_t i) {
        try {
            out[i] = contract(mps, fms, xs[i]);
        } catch (const Error& e) {
            failed[i] = 1;
            kinds[i] = e.kind();
            errors[i] = e.what();
        }
    };
    if (xs.size() >= 64) {
        parallel_for(xs.size(), run_one);
    } else {
        for (std::size_t i = 0; i < xs.size(); ++i) run_one(i);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (failed[i]) {
            throw_error(kinds[i],
                        "batch item " + std::to_string(i) + ": " + errors[i]);
        }
    }
    return out;
}

}  // namespace mpskit
