#include "mpskit/bool_compile.hpp"

#include <bit>
#include <string>

#include "mpskit/error.hpp"

namespace mpskit {

namespace {

// phys component 0 multiplies x (a positive literal), component 1 multiplies
// 1-x (a negated literal); DontCare activates both.
bool component_active(Lit lit, std::size_t phys) {
    if (lit == Lit::DontCare) return true;
    return (phys == 0) ? lit == Lit::Pos : lit == Lit::Neg;
}

std::vector<FeatureMap> indicator_maps(std::size_t n) {
    return std::vector<FeatureMap>(n, FeatureMap::binary_indicator());
}

}  // namespace

BooleanMps compile(const Dnf& dnf, std::size_t arity) {
    dnf.validate();
    if (dnf.arity != arity) {
        throw_error(ErrorKind::Shape,
                    "DNF arity " + std::to_string(dnf.arity) +
                        " does not match requested arity " + std::to_string(arity));
    }
    const std::size_t n = arity;
    const std::size_t m = dnf.term_count();

    BooleanMps out;
    out.fms = indicator_maps(n);
    out.mps.boundary = Boundary::Open;

    if (m == 0) {
        // Constant 0: trivial bond, all-zero tensors.
        for (std::size_t i = 0; i < n; ++i) {
            out.mps.sites.push_back(SiteTensor::zeros(1, 2, 1));
        }
        return out;
    }

    if (n == 1) {
        SiteTensor site = SiteTensor::zeros(1, 2, 1);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t s = 0; s < 2; ++s) {
                if (component_active(dnf.terms[j][0], s)) site.at(0, s, 0, 0) += 1.0;
            }
        }
        out.mps.sites.push_back(std::move(site));
        return out;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t left = (i == 0) ? 1 : m;
        const std::size_t right = (i + 1 == n) ? 1 : m;
        SiteTensor site = SiteTensor::zeros(left, 2, right);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t a = (i == 0) ? 0 : j;
            const std::size_t b = (i + 1 == n) ? 0 : j;
            for (std::size_t s = 0; s < 2; ++s) {
                if (component_active(dnf.terms[j][i], s)) site.at(0, s, a, b) = 1.0;
            }
        }
        out.mps.sites.push_back(std::move(site));
    }
    return out;
}

GateSpec GateSpec::universal_and(std::vector<bool> negated) {
    GateSpec g{Kind::UniversalAnd, std::move(negated), 0, 0};
    g.arity = g.negated.size();
    return g;
}

GateSpec GateSpec::universal_or(std::vector<bool> negated) {
    GateSpec g{Kind::UniversalOr, std::move(negated), 0, 0};
    g.arity = g.negated.size();
    return g;
}

namespace {

BooleanMps compile_table(const TruthTable& table) {
    return compile(to_dnf(table), table.arity);
}

TruthTable universal_or_table(const std::vector<bool>& negated) {
    const std::size_t n = negated.size();
    TruthTable t = TruthTable::zeros(n);
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        bool any = false;
        for (std::size_t i = 1; i <= n && !any; ++i) {
            const int bit = TruthTable::bit_of(row, i, n);
            any = negated[i - 1] ? bit == 0 : bit == 1;
        }
        t.outputs[row] = any;
    }
    return t;
}

}  // namespace

BooleanMps compile_gate(const GateSpec& spec, std::string* warning) {
    switch (spec.kind) {
        case GateSpec::Kind::And2:
            return compile_gate(GateSpec::universal_and({false, false}));
        case GateSpec::Kind::UniversalAnd: {
            const std::size_t n = spec.negated.size();
            if (n == 0) {
                throw_error(ErrorKind::InvalidArgument,
                            "universal AND needs at least one literal");
            }
            BooleanMps out;
            out.fms = indicator_maps(n);
            out.mps.boundary = Boundary::Open;
            for (std::size_t i = 0; i < n; ++i) {
                SiteTensor site = SiteTensor::zeros(1, 2, 1);
                site.at(0, spec.negated[i] ? 1 : 0, 0, 0) = 1.0;
                out.mps.sites.push_back(std::move(site));
            }
            return out;
        }
        case GateSpec::Kind::Not1: {
            // Theorem form: d=1 kernel phi(X) = 1 - X, single unit tensor.
            BooleanMps out;
            out.fms = {FeatureMap::one_minus_x()};
            out.mps.boundary = Boundary::Open;
            SiteTensor site = SiteTensor::zeros(1, 1, 1);
            site.at(0, 0, 0, 0) = 1.0;
            out.mps.sites.push_back(std::move(site));
            return out;
        }
        case GateSpec::Kind::Or2:
            return compile_gate(GateSpec::universal_or({false, false}));
        case GateSpec::Kind::UniversalOr: {
            if (spec.negated.empty()) {
                throw_error(ErrorKind::InvalidArgument,
                            "universal OR needs at least one literal");
            }
            return compile_table(universal_or_table(spec.negated));
        }
        case GateSpec::Kind::Parity: {
            if (spec.arity == 0) {
                throw_error(ErrorKind::InvalidArgument, "parity needs arity >= 1");
            }
            TruthTable t = TruthTable::zeros(spec.arity);
            for (std::uint32_t row = 0; row < t.rows(); ++row) {
                t.outputs[row] = (std::popcount(row) % 2) == 1;
            }
            return compile_table(t);
        }
        case GateSpec::Kind::Threshold: {
            if (spec.arity == 0) {
                throw_error(ErrorKind::InvalidArgument,
                            "threshold needs arity >= 1");
            }
            if (spec.k > spec.arity && warning) {
                *warning = "threshold k=" + std::to_string(spec.k) +
                           " exceeds arity " + std::to_string(spec.arity) +
                           "; gate is constant false";
            }
            TruthTable t = TruthTable::zeros(spec.arity);
            for (std::uint32_t row = 0; row < t.rows(); ++row) {
                t.outputs[row] =
                    static_cast<std::size_t>(std::popcount(row)) >= spec.k;
            }
            return compile_table(t);
        }
    }
    throw_error(ErrorKind::InvalidArgument, "unknown gate kind");
}

ComplexityReport complexity_report(const Dnf& dnf) {
    dnf.validate();
    const Dnf reduced = minimize(dnf);

    auto stored_entries = [&](const Dnf& d) {
        const BooleanMps compiled = compile(d, d.arity);
        std::size_t count = 0;
        for (const auto& site : compiled.mps.sites) count += site.data.size();
        return count;
    };

    ComplexityReport report;
    report.arity = dnf.arity;
    report.term_count = dnf.term_count();
    report.term_count_minimized = reduced.term_count();
    report.parameter_count = stored_entries(dnf);
    report.parameter_count_minimized = stored_entries(reduced);
    return report;
}

std::vector<std::int64_t> exhaustive_outputs(const BooleanMps& compiled) {
    const std::size_t n = compiled.mps.size();
    if (n > 16) {
        throw_error(ErrorKind::SizeGuard,
                    "exhaustive evaluation is limited to 16 inputs");
    }
    compiled.mps.validate();
    const std::size_t rows = std::size_t{1} << n;
    std::vector<std::int64_t> out(rows, 0);
    std::vector<int> bits(n, 0);
    for (std::uint32_t row = 0; row < rows; ++row) {
        for (std::size_t i = 1; i <= n; ++i) {
            bits[i - 1] = TruthTable::bit_of(row, i, n);
        }
        out[row] = contract_bits(compiled.mps, compiled.fms, bits)[0];
    }
    return out;
}

VerifyResult verify_against_table(const BooleanMps& compiled,
                                  const TruthTable& table) {
    table.validate();
    if (compiled.mps.size() != table.arity) {
        throw_error(ErrorKind::Shape,
                    "MPS site count does not match table arity");
    }
    const auto outputs = exhaustive_outputs(compiled);
    VerifyResult result;
    result.rows_checked = outputs.size();
    for (std::uint32_t row = 0; row < outputs.size(); ++row) {
        const bool got = outputs[row] != 0;
        if (got != table.at(row)) {
            result.ok = false;
            result.first_mismatch_row = row;
            result.got = outputs[row];
            result.expected = table.at(row) ? 1 : 0;
            return result;
        }
    }
    return result;
}

}  // namespace mpskit
