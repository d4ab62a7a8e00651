// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Heavier Monte-Carlo settings live here rather than in the
// unit suites; everything is seed-fixed and deterministic.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mpskit/activated.hpp"
#include "mpskit/bool_compile.hpp"
#include "mpskit/bool_expr.hpp"
#include "mpskit/dnf.hpp"
#include "mpskit/fit.hpp"
#include "mpskit/flatten.hpp"
#include "mpskit/gp.hpp"
#include "mpskit/rng.hpp"
#include "mpskit/stats.hpp"

using namespace mpskit;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, double seconds,
            const std::string& detail = "") {
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL",
                number, name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

double run_timed(const std::function<bool(std::string&)>& body, int number,
                 const std::string& name, double budget_seconds = 0.0) {
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (ok && budget_seconds > 0.0 && secs > budget_seconds) {
        ok = false;
        detail = "runtime budget of " + std::to_string(budget_seconds) +
                 " s exceeded";
    }
    report(number, name, ok, secs, detail);
    return secs;
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<int> row_bits(std::uint32_t row, std::size_t n) {
    std::vector<int> bits(n);
    for (std::size_t i = 1; i <= n; ++i) {
        bits[i - 1] = TruthTable::bit_of(row, i, n);
    }
    return bits;
}

std::string channel_pattern(const Mps& mps, std::size_t channel) {
    const std::size_t n = mps.size();
    std::string pattern;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& site = mps.sites[i];
        const std::size_t a = i == 0 ? 0 : channel;
        const std::size_t b = i + 1 == n ? 0 : channel;
        const double pos = site.at(0, 0, a, b);
        const double neg = site.at(0, 1, a, b);
        pattern += (pos == 1.0 && neg == 1.0) ? 'D' : (pos == 1.0 ? 'P' : 'N');
    }
    return pattern;
}

std::vector<std::string> sorted_patterns(const Mps& mps) {
    const std::size_t m = mps.size() == 1 ? 1 : mps.sites[0].right_bond;
    std::vector<std::string> out;
    for (std::size_t j = 0; j < m; ++j) out.push_back(channel_pattern(mps, j));
    std::sort(out.begin(), out.end());
    return out;
}

Mps reference_chain(const std::vector<std::vector<double>>& first,
                const std::vector<std::vector<std::vector<double>>>& diags,
                const std::vector<std::vector<double>>& last) {
    const std::size_t m = first[0].size();
    Mps mps;
    mps.boundary = Boundary::Open;
    SiteTensor s1 = SiteTensor::zeros(1, 2, m);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t j = 0; j < m; ++j) s1.at(0, s, 0, j) = first[s][j];
    }
    mps.sites.push_back(std::move(s1));
    for (const auto& diag_pair : diags) {
        SiteTensor mid = SiteTensor::zeros(m, 2, m);
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t j = 0; j < m; ++j) {
                mid.at(0, s, j, j) = diag_pair[s][j];
            }
        }
        mps.sites.push_back(std::move(mid));
    }
    SiteTensor sn = SiteTensor::zeros(m, 2, 1);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t j = 0; j < m; ++j) sn.at(0, s, j, 0) = last[s][j];
    }
    mps.sites.push_back(std::move(sn));
    return mps;
}

TruthTable table_of(const std::string& expr, std::size_t arity) {
    return table_from_expr(*parse_expr(expr), arity);
}

TruthTable parity_table(std::size_t n) {
    TruthTable t = TruthTable::zeros(n);
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        t.outputs[row] = (std::popcount(row) % 2) == 1;
    }
    return t;
}

TruthTable threshold_table(std::size_t n, std::size_t k) {
    TruthTable t = TruthTable::zeros(n);
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        t.outputs[row] = static_cast<std::size_t>(std::popcount(row)) >= k;
    }
    return t;
}

// --- criterion bodies -------------------------------------------------------

bool golden_gates(std::string& detail) {
    struct Golden {
        TruthTable table;
        Mps reference;
    };
    const std::vector<Golden> gates{
        {table_of("X1|X2|X3", 3),
         reference_chain({{1, 0, 0, 0, 1, 1, 1}, {0, 1, 1, 1, 0, 0, 0}},
                     {{{0, 1, 0, 1, 0, 1, 1}, {1, 0, 1, 0, 1, 0, 0}}},
                     {{0, 0, 1, 1, 1, 0, 1}, {1, 1, 0, 0, 0, 1, 0}})},
        {parity_table(3),
         reference_chain({{1, 0, 0, 1}, {0, 1, 1, 0}},
                     {{{0, 1, 0, 1}, {1, 0, 1, 0}}},
                     {{0, 0, 1, 1}, {1, 1, 0, 0}})},
        {threshold_table(3, 2),
         reference_chain({{1, 1, 0, 1}, {0, 0, 1, 0}},
                     {{{1, 0, 1, 1}, {0, 1, 0, 0}}},
                     {{0, 1, 1, 1}, {1, 0, 0, 0}})},
    };
    for (const auto& g : gates) {
        const BooleanMps compiled = compile(to_dnf(g.table), 3);
        const auto outputs = exhaustive_outputs(compiled);
        for (std::uint32_t row = 0; row < 8; ++row) {
            if (outputs[row] != (g.table.at(row) ? 1 : 0)) {
                detail = "bit mismatch at row " + std::to_string(row);
                return false;
            }
        }
        if (sorted_patterns(compiled.mps) != sorted_patterns(g.reference)) {
            detail = "tensor mismatch beyond bond permutation";
            return false;
        }
    }
    return true;
}

bool all_arity4_tables(std::string& detail) {
    for (std::uint32_t bits = 0;; ++bits) {
        TruthTable t = TruthTable::zeros(4);
        for (std::uint32_t row = 0; row < 16; ++row) {
            t.outputs[row] = ((bits >> row) & 1u) != 0;
        }
        const BooleanMps compiled = compile(to_dnf(t), 4);
        const auto outputs = exhaustive_outputs(compiled);
        for (std::uint32_t row = 0; row < 16; ++row) {
            if (outputs[row] != (t.at(row) ? 1 : 0)) {
                detail = "table " + std::to_string(bits) + " row " +
                         std::to_string(row);
                return false;
            }
        }
        if (bits == 0xFFFFu) break;
    }
    return true;
}

bool minimization_soundness(std::string& detail) {
    const Dnf or3 = to_dnf(table_of("X1|X2|X3", 3));
    const Dnf reduced = minimize(or3);
    if (or3.term_count() != 7 || reduced.term_count() != 3) {
        detail = "OR3 cover sizes m=" + std::to_string(or3.term_count()) +
                 " m'=" + std::to_string(reduced.term_count());
        return false;
    }
    Rng rng(20260808);
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t n = 1 + rng.below(6);
        TruthTable t = TruthTable::zeros(n);
        for (std::size_t row = 0; row < t.rows(); ++row) {
            t.outputs[row] = rng.coin();
        }
        const Dnf d = to_dnf(t);
        const Dnf m = minimize(d);
        if (m.term_count() > d.term_count() || !(expand(m) == t)) {
            detail = "cover mismatch at rep " + std::to_string(rep);
            return false;
        }
    }
    return true;
}

bool flatten_equivalence(std::string& detail) {
    Rng rng(4242);
    auto pick_map = [&](Rng& r) {
        switch (r.below(3)) {
            case 0: return FeatureMap::binary_indicator();
            case 1: return FeatureMap::affine_one();
            default: return FeatureMap::trig_pair();
        }
    };
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + rng.below(8);
        const bool activated = rng.coin();
        const std::size_t label = activated ? 1 + rng.below(3) : 0;

        Mps mps;
        mps.boundary = Boundary::Open;
        std::vector<FeatureMap> fms;
        std::vector<std::size_t> bonds(n + 1, 1);
        for (std::size_t i = 1; i < n; ++i) bonds[i] = 1 + rng.below(4);
        const std::size_t p = Mps::default_label_site(n);
        for (std::size_t i = 0; i < n; ++i) {
            fms.push_back(pick_map(rng));
            SiteTensor site = SiteTensor::zeros(
                bonds[i], 2, bonds[i + 1],
                (label > 0 && i == p) ? label : 0);
            for (auto& v : site.data) v = rng.uniform(-1.0, 1.0);
            mps.sites.push_back(std::move(site));
        }
        if (label > 0) mps.label_site = p;

        if (!activated) {
            const FlatNetwork flat = flatten(mps, fms);
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<double> x(n);
                for (auto& v : x) v = rng.uniform01();
                const double a = contract(mps, fms, x)[0];
                const double b = pre_activation_flat(flat, x)[0];
                if (!rel_close(a, b, 1e-10)) {
                    detail = "plain instance " + std::to_string(inst);
                    return false;
                }
            }
        } else {
            std::vector<double> w(label);
            for (auto& v : w) v = rng.uniform(-1.0, 1.0);
            const ActivatedMps model{
                std::move(mps), fms,
                rng.coin() ? ScaleInvariantSigmoid::reciprocal_shift(1.0)
                           : ScaleInvariantSigmoid::scaled_logistic(1.5),
                std::move(w)};
            const FlatNetwork flat = flatten(model);
            for (int rep = 0; rep < 100; ++rep) {
                std::vector<double> x(n);
                for (auto& v : x) v = rng.uniform01();
                const double a = eval_activated(model, x);
                const double b = evaluate_flat(flat, x);
                if (!rel_close(a, b, 1e-10)) {
                    detail = "activated instance " + std::to_string(inst);
                    return false;
                }
            }
        }
    }

    // The parity flattening under the canonical kernel order.
    const BooleanMps parity = compile_gate(GateSpec::parity(3));
    const FlatNetwork flat = flatten(parity.mps, parity.fms);
    const std::vector<double> want{1, 0, 0, 1, 0, 1, 1, 0};
    for (std::size_t s = 0; s < 8; ++s) {
        if (flat.weight(0, s) != want[s]) {
            detail = "parity weight row mismatch";
            return false;
        }
    }
    return true;
}

bool linear_space_closure(std::string& detail) {
    Rng rng(5151);
    auto random_instance = [&](std::size_t n, const ScaleInvariantSigmoid* sig) {
        const std::size_t chi = 1 + rng.below(3);
        const std::size_t label = 1 + rng.below(3);
        Mps core;
        core.boundary = Boundary::Open;
        const std::size_t p = Mps::default_label_site(n);
        std::vector<FeatureMap> fms;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t l = i == 0 ? 1 : chi;
            const std::size_t r = i + 1 == n ? 1 : chi;
            SiteTensor site = SiteTensor::zeros(l, 2, r, i == p ? label : 0);
            for (auto& v : site.data) v = rng.uniform(-1.0, 1.0);
            core.sites.push_back(std::move(site));
            fms.push_back(rng.coin() ? FeatureMap::binary_indicator()
                                     : FeatureMap::trig_pair());
        }
        core.label_site = p;
        std::vector<double> w(label);
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        const ScaleInvariantSigmoid sigma =
            sig ? *sig
                : (rng.coin()
                       ? ScaleInvariantSigmoid::reciprocal_shift(
                             0.5 + rng.uniform01())
                       : ScaleInvariantSigmoid::scaled_logistic(
                             0.5 + rng.uniform01()));
        return ActivatedMps{std::move(core), std::move(fms), sigma, std::move(w)};
    };

    for (int pair = 0; pair < 500; ++pair) {
        const std::size_t n = 2 + rng.below(3);
        ActivatedMps a = random_instance(n, nullptr);
        ActivatedMps b = random_instance(n, &a.sigma);
        const ActivatedMps sum = add(a, b);

        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> x(n);
            for (auto& v : x) v = rng.uniform01();
            const double lhs = eval_activated(sum, x);
            const double rhs = eval_activated(a, x) + eval_activated(b, x);
            if (!rel_close(lhs, rhs, 1e-12)) {
                detail = "additivity failed at pair " + std::to_string(pair);
                return false;
            }
        }

        // Structural zero blocks are exact.
        const std::size_t p = *sum.core.label_site;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& sa = a.core.sites[i];
            const auto& sm = sum.core.sites[i];
            for (std::size_t l = 0; l < sm.label_slots(); ++l) {
                for (std::size_t s = 0; s < sm.phys_dim; ++s) {
                    for (std::size_t aa = 0; aa < sm.left_bond; ++aa) {
                        for (std::size_t bb = 0; bb < sm.right_bond; ++bb) {
                            const bool phys_a = s < sa.phys_dim;
                            const bool left_a = i == 0 || aa < sa.left_bond;
                            const bool right_a =
                                i + 1 == n || bb < sa.right_bond;
                            const bool label_a = i != p || l < sa.label_slots();
                            const bool pure_a =
                                phys_a && left_a && right_a && label_a;
                            const bool pure_b =
                                !phys_a && (i == 0 || !left_a) &&
                                (i + 1 == n || !right_a) && (i != p || !label_a);
                            if (!pure_a && !pure_b &&
                                sm.at(l, s, aa, bb) != 0.0) {
                                detail = "zero-block violation";
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }

    // scale vs scale_via_c for positive factors.
    for (int rep = 0; rep < 60; ++rep) {
        ActivatedMps a = random_instance(3, nullptr);
        const double k = 0.25 + 4.0 * rng.uniform01();
        const ActivatedMps via_w = scale(a, k);
        const ActivatedMps via_c = scale_via_c(a, k);
        for (int probe = 0; probe < 50; ++probe) {
            std::vector<double> x{rng.uniform01(), rng.uniform01(),
                                  rng.uniform01()};
            if (!rel_close(eval_activated(via_w, x), eval_activated(via_c, x),
                           1e-10)) {
                detail = "scale_via_c disagreement at k=" + std::to_string(k);
                return false;
            }
        }
    }
    return true;
}

bool gp_limit(std::string& detail) {
    GpExperimentConfig cfg;
    cfg.widths = {8, 64, 512, 2048};
    cfg.n_sites = 5;
    cfg.chi = 2;
    cfg.dataset = GpExperimentConfig::default_dataset(5, 8);
    cfg.n_samples = 10000;
    cfg.seed = 20260808;

    const GpReport report = run_gp_experiment(cfg);
    for (std::size_t i = 0; i + 1 < report.widths.size(); ++i) {
        if (!(report.widths[i].median_abs_excess_kurtosis >
              report.widths[i + 1].median_abs_excess_kurtosis)) {
            detail = "median |kurtosis| not strictly decreasing at step " +
                     std::to_string(i);
            return false;
        }
    }

    // Ten seed replications at the largest width; every dataset point must
    // pass the 1% normality test in at least nine of them.
    std::vector<std::size_t> passes(cfg.dataset.size(), 0);
    for (int r = 0; r < 10; ++r) {
        GpExperimentConfig rep_cfg = cfg;
        rep_cfg.seed = cfg.seed + 1000 + static_cast<std::uint64_t>(r);
        const auto samples = gp_output_samples(rep_cfg, 2048);
        for (std::size_t j = 0; j < cfg.dataset.size(); ++j) {
            std::vector<double> col(cfg.n_samples);
            for (std::size_t s = 0; s < cfg.n_samples; ++s) {
                col[s] = samples[s * cfg.dataset.size() + j];
            }
            if (dagostino_k2(col).p_value > 0.01) ++passes[j];
        }
    }
    for (std::size_t j = 0; j < passes.size(); ++j) {
        if (passes[j] < 9) {
            detail = "dataset point " + std::to_string(j) + " passed only " +
                     std::to_string(passes[j]) + "/10 replications";
            return false;
        }
    }
    return true;
}

bool approximation_witness(std::string& detail) {
    const std::vector<std::size_t> dims{2, 8, 32};
    std::vector<double> medians;
    for (const std::size_t d : dims) {
        std::vector<double> sups;
        for (int seed = 1; seed <= 5; ++seed) {
            FitConfig cfg;
            cfg.target = "sin2pi";
            cfg.grid = uniform_grid_1d(64);
            cfg.label_dim = d;
            cfg.seed = 100 + static_cast<std::uint64_t>(seed);

            const auto probe_model =
                random_activated(cfg.n_sites, cfg.chi, cfg.label_dim, cfg.fm,
                                 cfg.sigma, cfg.seed, 0.7);
            const double gc = grad_check(probe_model, {0.37}, 1e-5);
            if (gc > 1e-4) {
                detail = "gradient check " + std::to_string(gc);
                return false;
            }

            const FitResult r = fit_activated_mps(cfg);
            if (r.diverged) {
                detail = "divergence at D=" + std::to_string(d);
                return false;
            }
            if (r.max_loss_ratio > 10.0) {
                detail = "loss grew by more than 10x within one step";
                return false;
            }
            sups.push_back(r.sup_error);
        }
        medians.push_back(median(sups));
    }
    for (std::size_t i = 0; i + 1 < medians.size(); ++i) {
        if (medians[i] < medians[i + 1]) {
            detail = "median sup error increased with D";
            return false;
        }
    }
    if (medians.back() > 0.1) {
        detail = "median sup error at D=32 is " + std::to_string(medians.back());
        return false;
    }
    return true;
}

bool complexity_accounting(std::string& detail) {
    const ComplexityReport parity3 = complexity_report(to_dnf(parity_table(3)));
    if (parity3.parameter_count != 48 || parity3.term_count != 4) {
        detail = "parity-3 count " + std::to_string(parity3.parameter_count);
        return false;
    }
    const ComplexityReport or3 = complexity_report(to_dnf(table_of("X1|X2|X3", 3)));
    if (or3.term_count != 7 || or3.term_count_minimized != 3 ||
        or3.parameter_count_minimized >= or3.parameter_count) {
        detail = "OR3 counts did not shrink under minimization";
        return false;
    }

    // Theta(n m^2) scaling on the parity family, where m = 2^{n-1}.
    for (std::size_t n = 3; n <= 8; ++n) {
        const Dnf d = to_dnf(parity_table(n));
        const std::size_t m = d.term_count();
        if (m != (std::size_t{1} << (n - 1))) {
            detail = "parity family term count is off";
            return false;
        }
        const BooleanMps compiled = compile(d, n);
        std::size_t count = 0;
        for (const auto& site : compiled.mps.sites) count += site.data.size();
        if (count != 2 * m * (2 + (n - 2) * m)) {
            detail = "stored entries differ from the closed form at n=" +
                     std::to_string(n);
            return false;
        }
        const double ratio = static_cast<double>(count) /
                             (static_cast<double>(n) * m * m);
        if (ratio < 0.5 || ratio > 2.5) {
            detail = "count/(n m^2) ratio " + std::to_string(ratio);
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    double total = 0.0;
    total += run_timed(golden_gates, 1,
                       "golden-gate exactness (OR3, parity3, threshold)", 1.0);
    total += run_timed(all_arity4_tables, 2,
                       "all 65536 arity-4 tables compile and verify", 60.0);
    total += run_timed(minimization_soundness, 3,
                       "minimization preserves the true set (10000 tables)");
    total += run_timed(flatten_equivalence, 4,
                       "flatten equals contraction on 1000 random models");
    total += run_timed(linear_space_closure, 5,
                       "linear-space closure (500 random pairs)");
    total += run_timed(gp_limit, 6, "Gaussian limit of wide models", 300.0);
    total += run_timed(approximation_witness, 7,
                       "approximation witness for sin(2 pi x)");
    total += run_timed(complexity_accounting, 8, "complexity accounting");
    std::printf("%s: %d/8 criteria passed (%.1f s total)\n",
                g_failures == 0 ? "OK" : "FAILED", 8 - g_failures, total);
    return g_failures;
}
